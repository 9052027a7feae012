#pragma once

// Counter-based random streams (Philox4x32-10). Every draw is a pure
// function of (master_seed, stream_index, counter), so trajectories can be
// assigned to workers in any order without changing the numbers.

#include <cmath>
#include <cstdint>

namespace smp {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline PhiloxBlock philox4x32_10(std::uint64_t key,
                                 std::uint64_t ctr_lo,
                                 std::uint64_t ctr_hi) {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {{c0, c1, c2, c3}};
}

}  // namespace detail

class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() {
        if (buffered_) {
            buffered_ = false;
            return spare_;
        }
        const detail::PhiloxBlock b =
            detail::philox4x32_10(master_seed_, counter_++, stream_index_);
        spare_ = (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
        buffered_ = true;
        return (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
    }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // (0, 1); safe to feed into log()
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double exponential(double rate) {
        return -std::log(uniform_open()) / rate;
    }

    double normal() {
        if (have_gauss_) {
            have_gauss_ = false;
            return gauss_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        gauss_ = rad * std::sin(ang);
        have_gauss_ = true;
        return rad * std::cos(ang);
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool buffered_ = false;
    double gauss_ = 0.0;
    bool have_gauss_ = false;
};

}  // namespace smp
