#pragma once

#include <cstdint>
#include <initializer_list>

namespace treemem {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based random stream: every draw is a pure function of a key
/// (e.g. seed, object, frame, channel) and a draw counter, so results do not
/// depend on call order or thread interleaving.
class CounterRng {
public:
    explicit CounterRng(std::initializer_list<std::uint64_t> key) noexcept;
    explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(++counter_)); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller (one value per two uniforms).
    double normal() noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace treemem
