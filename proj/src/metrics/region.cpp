#include "treemem/metrics/region.hpp"

#include <algorithm>

namespace treemem::metrics {

double region_j(const Mask& pred, const Mask& gt) {
    const auto inter = intersection_count(pred, gt);
    const auto uni = union_count(pred, gt);
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<BBox> mask_to_bbox(const Mask& mask) {
    std::optional<BBox> box;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            if (!box) {
                box = BBox{x, y, x, y};
                continue;
            }
            box->x_min = std::min(box->x_min, x);
            box->y_min = std::min(box->y_min, y);
            box->x_max = std::max(box->x_max, x);
            box->y_max = std::max(box->y_max, y);
        }
    }
    return box;
}

}  // namespace treemem::metrics
