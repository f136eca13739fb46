#include "treemem/core/mask.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <string>

namespace treemem {

Mask::Mask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw DomainError("mask dimensions must be >= 1, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits) : Mask(width, height) {
    if (bits.size() != bits_.size()) {
        throw DomainError("mask bit buffer has " + std::to_string(bits.size()) +
                          " cells, expected " + std::to_string(bits_.size()));
    }
    std::transform(bits.begin(), bits.end(), bits_.begin(),
                   [](std::uint8_t b) { return static_cast<std::uint8_t>(b != 0); });
}

std::size_t Mask::count() const noexcept {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

namespace {

void require_same_shape(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) {
        throw DomainError("mask dimension mismatch: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                          "x" + std::to_string(b.height()));
    }
}

}  // namespace

std::size_t intersection_count(const Mask& a, const Mask& b) {
    require_same_shape(a, b);
    const auto x = a.bits();
    const auto y = b.bits();
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) n += x[i] & y[i];
    return n;
}

std::size_t union_count(const Mask& a, const Mask& b) {
    require_same_shape(a, b);
    const auto x = a.bits();
    const auto y = b.bits();
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) n += x[i] | y[i];
    return n;
}

std::string encode_rle(const Mask& mask) {
    std::string out;
    const auto bits = mask.bits();
    std::uint8_t current = 0;
    std::size_t run = 0;
    for (const auto b : bits) {
        if (b == current) {
            ++run;
            continue;
        }
        out += std::to_string(run);
        out += ',';
        current = b;
        run = 1;
    }
    out += std::to_string(run);
    return out;
}

Mask decode_rle(std::string_view counts, int width, int height) {
    Mask mask(width, height);
    std::vector<std::uint8_t> bits;
    bits.reserve(mask.size());

    if (counts.empty()) throw ParseError("empty RLE string");

    std::uint8_t value = 0;
    std::size_t pos = 0;
    std::size_t runs = 0;
    while (true) {
        const auto comma = counts.find(',', pos);
        const auto token = counts.substr(pos, comma == std::string_view::npos ? counts.npos
                                                                              : comma - pos);
        if (token.empty()) throw ParseError("empty run in RLE string");
        std::size_t run = 0;
        const auto* first = token.data();
        const auto* last = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(first, last, run);
        if (ec != std::errc{} || ptr != last) {
            throw ParseError("invalid run length '" + std::string(token) + "' in RLE string");
        }
        // Only the leading zero run may be empty; anything else is non-canonical.
        if (run == 0 && runs != 0) throw ParseError("zero-length run after the first in RLE");
        if (bits.size() + run > mask.size()) throw ParseError("RLE runs exceed mask size");
        bits.insert(bits.end(), run, value);
        ++runs;
        value ^= 1;
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (bits.size() != mask.size()) {
        throw ParseError("RLE covers " + std::to_string(bits.size()) + " cells, expected " +
                         std::to_string(mask.size()));
    }
    return Mask(width, height, std::move(bits));
}

}  // namespace treemem
