#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace treemem::simworld {

enum class ShapeKind { rect, disc };

/// Object centre at `frame`; positions between waypoints are interpolated
/// linearly and held constant before the first and after the last.
struct Waypoint {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct ObjectSpec {
    int id = 0;
    ShapeKind shape = ShapeKind::rect;
    /// Rect: width and height. Disc: radius in width, height unused.
    double width = 0.0;
    double height = 0.0;
    std::vector<Waypoint> trajectory;
    /// Inclusive [start, end] frame ranges during which the object is hidden.
    std::vector<std::pair<int, int>> occlusion_windows;
    bool is_target = false;
    /// How strongly this object attracts a tracker that has lost its target.
    double distractor_similarity = 0.0;

    bool hidden_at(int t) const;

    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct NoiseSpec {
    /// Stddev of the per-frame predicted-IoU error.
    double iou_calibration_noise = 0.02;
    /// Occlusion-score magnitude outside occlusion windows.
    double occ_margin = 4.0;
    /// Occlusion scores inside the target's windows are uniform in +-band.
    double uncertain_band = 1.5;
    /// Probability that a candidate's size is off by one pixel.
    double mask_jitter = 0.1;
    /// Stddev of the predicted-IoU error that depends on the memory bank.
    double path_noise = 0.002;
    /// Predicted IoU of an empty candidate while the target is hidden.
    double occluded_empty_iou = 0.6;
    /// Ratings are scaled by consistency^power (see mock_decoder.hpp).
    double consistency_power = 3.0;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct ScenarioSpec {
    std::string name;
    std::uint64_t seed = 0;
    int width = 64;
    int height = 64;
    int num_frames = 2;
    std::vector<ObjectSpec> objects;
    NoiseSpec noise;

    const ObjectSpec& object(int id) const;
    std::vector<int> target_ids() const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Throws ConfigError naming the first broken constraint.
void validate(const ScenarioSpec& spec);

nlohmann::json to_json(const ScenarioSpec& spec);
/// Parses and validates. Throws ParseError on malformed documents and
/// ConfigError on invalid ones.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

/// Every *.json file in `dir`, sorted by file name.
std::vector<ScenarioSpec> load_suite(const std::filesystem::path& dir);

}  // namespace treemem::simworld
