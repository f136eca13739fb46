#include "treemem/simworld/suite.hpp"

#include "treemem/core/counter_rng.hpp"
#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace treemem::simworld {

Family family_from_string(const std::string& name) {
    if (name == "clean") return Family::clean;
    if (name == "occlusion") return Family::occlusion;
    if (name == "distractor") return Family::distractor;
    if (name == "long") return Family::longvideo;
    throw ConfigError("unknown scenario family '" + name + "'");
}

std::string to_string(Family family) {
    switch (family) {
        case Family::clean: return "clean";
        case Family::occlusion: return "occlusion";
        case Family::distractor: return "distractor";
        case Family::longvideo: return "long";
    }
    return "unknown";
}

namespace {

int default_frames(Family f) {
    switch (f) {
        case Family::clean: return 60;
        case Family::distractor: return 100;
        case Family::occlusion: return 200;
        case Family::longvideo: return 240;
    }
    return 100;
}

// Object wandering inside the horizontal band [x_lo, x_hi) of the canvas.
ObjectSpec make_object(CounterRng& rng, int id, int num_frames, double x_lo, double x_hi, int height) {
    ObjectSpec o;
    o.id = id;
    o.shape = rng.bernoulli(0.5) ? ShapeKind::rect : ShapeKind::disc;
    if (o.shape == ShapeKind::rect) {
        o.width = static_cast<double>(rng.integer(8, 12));
        o.height = static_cast<double>(rng.integer(8, 12));
    } else {
        o.width = static_cast<double>(rng.integer(4, 6));
    }
    const double margin = 7.0;
    const int step = static_cast<int>(rng.integer(30, 50));
    for (int f = 0;; f += step) {
        const int frame = std::min(f, num_frames - 1);
        o.trajectory.push_back({frame, std::round(rng.uniform(x_lo + margin, x_hi - margin)),
                                std::round(rng.uniform(margin, height - margin))});
        if (frame == num_frames - 1) break;
    }
    return o;
}

}  // namespace

std::vector<ScenarioSpec> generate_scenario_suite(Family family, int count, std::uint64_t base_seed,
                                                  const SuiteOptions& options) {
    if (count < 1) throw ConfigError("suite count must be at least 1");
    int frames = options.num_frames.value_or(default_frames(family));
    if (family == Family::longvideo) frames = std::max(frames, 200);
    if (frames < 2) throw ConfigError("suite num_frames must be at least 2");

    std::vector<ScenarioSpec> out;
    for (int i = 0; i < count; ++i) {
        ScenarioSpec s;
        s.seed = mix64(base_seed * 4 + static_cast<std::uint64_t>(family)) ^ static_cast<std::uint64_t>(i);
        s.name = to_string(family) + "-" + std::to_string(base_seed) + "-" + std::to_string(i);
        s.width = options.width;
        s.height = options.height;
        s.num_frames = frames;
        CounterRng rng({s.seed, 0x5EED});

        // Target on the left half, look-alikes on the right, so the two never overlap.
        const double mid = s.width / 2.0;
        auto target = make_object(rng, 1, frames, 0.0, mid, s.height);
        target.is_target = true;

        if (family == Family::occlusion || family == Family::longvideo) {
            const int windows = family == Family::longvideo ? 2 : 1;
            for (int w = 0; w < windows; ++w) {
                const double lo = windows == 1 ? 0.53 : (w == 0 ? 0.30 : 0.62);
                const double hi = windows == 1 ? 0.62 : (w == 0 ? 0.38 : 0.70);
                const int start = std::max(1, static_cast<int>(std::lround(rng.uniform(lo, hi) * frames)));
                const int length = static_cast<int>(rng.integer(15, 30));
                const int end = std::min(frames - 1, start + length - 1);
                if (start <= end) target.occlusion_windows.emplace_back(start, end);
            }
        }
        s.objects.push_back(std::move(target));

        if (family != Family::clean) {
            const int distractors = static_cast<int>(rng.integer(1, 2));
            const double band = (s.width - mid) / distractors;
            for (int d = 0; d < distractors; ++d) {
                auto o = make_object(rng, 2 + d, frames, mid + d * band, mid + (d + 1) * band, s.height);
                o.distractor_similarity = std::round(rng.uniform(0.65, 0.85) * 100.0) / 100.0;
                s.objects.push_back(std::move(o));
            }
        }
        validate(s);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace treemem::simworld
