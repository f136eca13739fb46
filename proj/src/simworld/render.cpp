#include "treemem/simworld/render.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace treemem::simworld {

Placement placement_at(const ObjectSpec& object, int t) {
    const auto& w = object.trajectory;
    Placement p{object.shape, w.front().x, w.front().y, object.width, object.height};
    if (t <= w.front().frame) return p;
    if (t >= w.back().frame) {
        p.cx = w.back().x;
        p.cy = w.back().y;
        return p;
    }
    const auto hi = std::upper_bound(w.begin(), w.end(), t, [](int v, const Waypoint& q) { return v < q.frame; });
    const auto lo = hi - 1;
    const double a = static_cast<double>(t - lo->frame) / static_cast<double>(hi->frame - lo->frame);
    p.cx = std::lerp(lo->x, hi->x, a);
    p.cy = std::lerp(lo->y, hi->y, a);
    return p;
}

Mask rasterize(const Placement& p, int width, int height) {
    Mask m(width, height);
    if (p.shape == ShapeKind::rect) {
        const int w = static_cast<int>(std::lround(p.width));
        const int h = static_cast<int>(std::lround(p.height));
        if (w <= 0 || h <= 0) return m;
        const int x0 = static_cast<int>(std::floor(p.cx - w / 2.0 + 0.5));
        const int y0 = static_cast<int>(std::floor(p.cy - h / 2.0 + 0.5));
        for (int y = std::max(0, y0); y < std::min(height, y0 + h); ++y) {
            for (int x = std::max(0, x0); x < std::min(width, x0 + w); ++x) m.set(x, y);
        }
        return m;
    }
    const double r = p.width;
    if (!(r > 0.0)) return m;
    const int x_lo = std::max(0, static_cast<int>(std::floor(p.cx - r)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(p.cx + r)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(p.cy - r)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(p.cy + r)));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x + 0.5 - p.cx;
            const double dy = y + 0.5 - p.cy;
            if (dx * dx + dy * dy < r * r) m.set(x, y);
        }
    }
    return m;
}

const Mask& GroundTruthFrame::mask_of(int id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return masks[i];
    }
    throw DomainError("no ground truth for object " + std::to_string(id));
}

bool GroundTruthFrame::visible_of(int id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return visible[i];
    }
    throw DomainError("no ground truth for object " + std::to_string(id));
}

GroundTruthFrame render_ground_truth(const ScenarioSpec& spec, int t) {
    if (t < 0 || t >= spec.num_frames) {
        throw DomainError("frame " + std::to_string(t) + " outside scenario " + spec.name);
    }
    GroundTruthFrame out;
    for (const auto& o : spec.objects) {
        const bool visible = !o.hidden_at(t);
        out.ids.push_back(o.id);
        out.visible.push_back(visible);
        out.masks.push_back(visible ? rasterize(placement_at(o, t), spec.width, spec.height)
                                    : Mask(spec.width, spec.height));
    }
    return out;
}

}  // namespace treemem::simworld
