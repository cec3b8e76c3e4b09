#pragma once

// Counter-based random streams. Every stochastic decision in the walker loop
// draws from a stream keyed on (master seed, loop index, draw counter), so a
// run is reproducible independent of how the work is batched or sharded.

#include <cstdint>

namespace tmc {

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace detail

class CounterRng {
public:
    CounterRng() = default;

    static CounterRng from_seed(std::uint64_t seed) noexcept {
        CounterRng r;
        r.state_ = detail::mix64(seed + detail::kGolden);
        return r;
    }

    // Stream keyed on two indices (typically loop index and draw counter).
    static CounterRng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
        CounterRng r;
        std::uint64_t s = detail::mix64(seed + detail::kGolden);
        s = detail::mix64(s ^ (a + 1) * detail::kGolden);
        s = detail::mix64(s ^ (b + 2) * detail::kGolden);
        r.state_ = s;
        return r;
    }

    std::uint64_t next() noexcept {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). Lemire multiply-shift; bias < 2^-32 for the small n
    // used here (candidate counts, side picks).
    std::uint32_t below(std::uint32_t n) noexcept {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

private:
    std::uint64_t state_ = 0;
};

// Per-loop key from which all of a loop's substreams are derived.
inline std::uint64_t loop_stream_key(std::uint64_t master_seed, std::uint64_t loop) noexcept {
    return detail::mix64(master_seed ^ (loop + 1) * detail::kGolden);
}

} // namespace tmc
