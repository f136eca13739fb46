#pragma once

#include "treemem/core/mask.hpp"
#include "treemem/simworld/scenario.hpp"

#include <vector>

namespace treemem::simworld {

/// A shape at a position. For discs `width` is the radius.
struct Placement {
    ShapeKind shape = ShapeKind::rect;
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Object placement at frame t (visibility is not considered).
Placement placement_at(const ObjectSpec& object, int t);

/// Rect: rounded width x height pixels centred on (cx, cy). Disc: pixels whose
/// centres lie strictly inside the radius. Clipped to the canvas.
Mask rasterize(const Placement& placement, int width, int height);

struct GroundTruthFrame {
    std::vector<int> ids;
    std::vector<Mask> masks;
    std::vector<bool> visible;

    const Mask& mask_of(int id) const;
    bool visible_of(int id) const;
};

/// Rasterizes every object at frame t; hidden objects get empty masks.
/// Throws DomainError for t outside [0, num_frames).
GroundTruthFrame render_ground_truth(const ScenarioSpec& spec, int t);

}  // namespace treemem::simworld
