#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace pscurv {

/// Counter-based generator: the n-th output is a pure function of
/// (seed, stream, n). Each sample index gets its own stream, so results do
/// not depend on which worker evaluates which sample.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    double normal() { return normal_(*this); }
    double uniform() { return uniform_(*this); }
    std::complex<double> complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

private:
    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace pscurv
