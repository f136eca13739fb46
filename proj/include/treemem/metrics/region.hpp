#pragma once

#include "treemem/core/mask.hpp"

#include <optional>

namespace treemem::metrics {

/// Jaccard index |pred ∩ gt| / |pred ∪ gt|. Both empty gives 1.
/// Throws DomainError on a dimension mismatch.
double region_j(const Mask& pred, const Mask& gt);

/// Inclusive box over set pixels, x = column, y = row.
struct BBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Tight box, or nullopt for an empty mask.
std::optional<BBox> mask_to_bbox(const Mask& mask);

}  // namespace treemem::metrics
