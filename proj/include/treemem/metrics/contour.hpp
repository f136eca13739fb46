#pragma once

#include "treemem/core/mask.hpp"

namespace treemem::metrics {

/// Mask pixels that touch background (4-neighbourhood) or the canvas edge.
Mask boundary_of(const Mask& mask);

/// ceil(0.008 * diagonal) for a width x height canvas.
int default_tolerance(int width, int height);

/// Boundary F-measure. A boundary pixel matches when some boundary pixel of
/// the other mask lies within Chebyshev distance `tolerance_px`. Both empty
/// gives 1; P + R = 0 gives 0. Throws DomainError on a dimension mismatch or
/// a negative tolerance.
double contour_f(const Mask& pred, const Mask& gt, int tolerance_px);

/// contour_f with default_tolerance.
double contour_f(const Mask& pred, const Mask& gt);

}  // namespace treemem::metrics
