#pragma once

#include "treemem/simworld/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace treemem::simworld {

enum class Family { clean, occlusion, distractor, longvideo };

/// "clean", "occlusion", "distractor", "long". Throws ConfigError otherwise.
Family family_from_string(const std::string& name);
std::string to_string(Family family);

struct SuiteOptions {
    /// Overrides the family's default length (clean 60, distractor 100,
    /// occlusion 200, long 240). The long family never goes below 200.
    std::optional<int> num_frames;
    int width = 64;
    int height = 64;
};

/// Deterministic scenarios for a family:
///   clean       one target, no distractor, never hidden
///   distractor  target plus 1-2 look-alikes, never hidden
///   occlusion   target plus 1-2 look-alikes, one window starting at
///               53-62% of the video and lasting 15-30 frames
///   long        as occlusion with two windows, at least 200 frames
/// Throws ConfigError when count < 1.
std::vector<ScenarioSpec> generate_scenario_suite(Family family, int count, std::uint64_t base_seed,
                                                  const SuiteOptions& options = {});

}  // namespace treemem::simworld
