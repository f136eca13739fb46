#pragma once

#include "treemem/core/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace treemem {

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws ParseError on characters outside the standard alphabet or bad padding.
Bytes base64_decode(std::string_view text);

/// 64-bit FNV-1a, used for request digests and replay integrity checks.
class Fnv1a64 {
public:
    Fnv1a64& update(std::span<const std::uint8_t> data) noexcept;
    Fnv1a64& update(std::string_view text) noexcept;
    /// Fixed-width little-endian encoding so the hash is platform independent.
    Fnv1a64& update(std::int64_t value) noexcept;

    std::uint64_t value() const noexcept { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Decimal text that parses back to the identical double ("%.17g").
std::string format_double(double value);

}  // namespace treemem
