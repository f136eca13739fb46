#include "treemem/metrics/contour.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace treemem::metrics {

namespace {

// Square max filter of radius r, done as a row pass then a column pass.
Mask dilate(const Mask& m, int r) {
    if (r == 0) return m;
    const int w = m.width();
    const int h = m.height();
    Mask rows(w, h);
    for (int y = 0; y < h; ++y) {
        // Running count of set pixels in the window [x - r, x + r].
        std::vector<int> prefix(static_cast<std::size_t>(w) + 1, 0);
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + (m.at(x, y) ? 1 : 0);
        for (int x = 0; x < w; ++x) {
            const int lo = std::max(0, x - r);
            const int hi = std::min(w, x + r + 1);
            if (prefix[hi] - prefix[lo] > 0) rows.set(x, y);
        }
    }
    Mask out(w, h);
    for (int x = 0; x < w; ++x) {
        std::vector<int> prefix(static_cast<std::size_t>(h) + 1, 0);
        for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + (rows.at(x, y) ? 1 : 0);
        for (int y = 0; y < h; ++y) {
            const int lo = std::max(0, y - r);
            const int hi = std::min(h, y + r + 1);
            if (prefix[hi] - prefix[lo] > 0) out.set(x, y);
        }
    }
    return out;
}

}  // namespace

Mask boundary_of(const Mask& mask) {
    Mask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const bool edge = !mask.in_bounds(x - 1, y) || !mask.at(x - 1, y) ||
                              !mask.in_bounds(x + 1, y) || !mask.at(x + 1, y) ||
                              !mask.in_bounds(x, y - 1) || !mask.at(x, y - 1) ||
                              !mask.in_bounds(x, y + 1) || !mask.at(x, y + 1);
            if (edge) out.set(x, y);
        }
    }
    return out;
}

int default_tolerance(int width, int height) {
    return static_cast<int>(std::ceil(0.008 * std::hypot(static_cast<double>(width), static_cast<double>(height))));
}

double contour_f(const Mask& pred, const Mask& gt, int tolerance_px) {
    if (!pred.same_shape(gt)) throw DomainError("contour_f: mask dimensions differ");
    if (tolerance_px < 0) throw DomainError("contour_f: negative tolerance");
    const auto pb = boundary_of(pred);
    const auto gb = boundary_of(gt);
    const auto np = pb.count();
    const auto ng = gb.count();
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;
    const double precision = static_cast<double>(intersection_count(pb, dilate(gb, tolerance_px))) / np;
    const double recall = static_cast<double>(intersection_count(gb, dilate(pb, tolerance_px))) / ng;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double contour_f(const Mask& pred, const Mask& gt) {
    return contour_f(pred, gt, default_tolerance(pred.width(), pred.height()));
}

}  // namespace treemem::metrics
