#pragma once

// Log-binned empirical density: uniform bins in y = ln x with explicit
// underflow/overflow counters, so no sample is ever dropped.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smp {

class LogHistogram {
public:
    LogHistogram() = default;

    LogHistogram(double y_lo, double dy, std::size_t bins)
        : y_lo_(y_lo), dy_(dy), counts_(bins, 0) {
        if (!(dy > 0.0)) throw std::invalid_argument("bin width must be > 0");
        if (bins == 0) throw std::invalid_argument("need at least one bin");
    }

    void add_log(double y) {
        ++total_;
        const double pos = (y - y_lo_) / dy_;
        if (pos < 0.0) {
            ++underflow_;
            return;
        }
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i >= counts_.size()) {
            ++overflow_;
            return;
        }
        ++counts_[i];
    }

    void add_value(double x) { add_log(std::log(x)); }

    void merge(const LogHistogram& other) {
        if (other.counts_.size() != counts_.size() || other.y_lo_ != y_lo_ ||
            other.dy_ != dy_)
            throw std::invalid_argument("histogram layouts differ");
        for (std::size_t i = 0; i < counts_.size(); ++i)
            counts_[i] += other.counts_[i];
        underflow_ += other.underflow_;
        overflow_ += other.overflow_;
        total_ += other.total_;
    }

    std::size_t bins() const { return counts_.size(); }
    double y_lo() const { return y_lo_; }
    double dy() const { return dy_; }
    double bin_left(std::size_t i) const { return y_lo_ + dy_ * static_cast<double>(i); }
    double bin_center(std::size_t i) const { return bin_left(i) + 0.5 * dy_; }
    std::uint64_t count(std::size_t i) const { return counts_[i]; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t underflow() const { return underflow_; }
    std::uint64_t overflow() const { return overflow_; }
    std::uint64_t total() const { return total_; }

    // Empirical probability mass of bin i.
    double mass(std::size_t i) const {
        return total_ ? static_cast<double>(counts_[i]) / static_cast<double>(total_)
                      : 0.0;
    }

    // Density estimate on the y axis.
    double density(std::size_t i) const { return mass(i) / dy_; }

private:
    double y_lo_ = 0.0;
    double dy_ = 1.0;
    std::vector<std::uint64_t> counts_;
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace smp
