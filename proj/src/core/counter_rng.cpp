#include "treemem/core/counter_rng.hpp"

#include <cmath>
#include <numbers>

namespace treemem {

CounterRng::CounterRng(std::initializer_list<std::uint64_t> key) noexcept : key_(0x5eed) {
    for (const auto k : key) key_ = mix64(key_ ^ mix64(k));
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t CounterRng::integer(std::int64_t lo, std::int64_t hi) noexcept {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
}

}  // namespace treemem
