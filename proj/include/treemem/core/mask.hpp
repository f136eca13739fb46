#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treemem {

/// Binary occupancy grid, row-major with (row = y, col = x), zero-based.
///
/// Width and height are always >= 1 and the bit buffer holds exactly
/// width * height cells. A default-constructed mask is a single empty pixel.
class Mask {
public:
    Mask() : Mask(1, 1) {}
    /// All-false mask. Throws DomainError on non-positive dimensions.
    Mask(int width, int height);
    /// Throws DomainError unless bits.size() == width * height.
    Mask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value = true) noexcept { bits_[index(x, y)] = value ? 1 : 0; }
    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    /// Cells normalized to 0/1.
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }
    bool same_shape(const Mask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// |a AND b|. Masks must share dimensions (DomainError otherwise).
std::size_t intersection_count(const Mask& a, const Mask& b);
/// |a OR b|. Masks must share dimensions (DomainError otherwise).
std::size_t union_count(const Mask& a, const Mask& b);

/// Canonical RLE: comma-separated run lengths of alternating zero/one runs
/// over the row-major bit string, always starting with the zero run.
std::string encode_rle(const Mask& mask);

/// Inverse of encode_rle. Dimensions are carried out of band. Throws
/// ParseError on malformed text or when the runs do not cover exactly
/// width * height cells.
Mask decode_rle(std::string_view counts, int width, int height);

}  // namespace treemem
