#pragma once

#include "treemem/core/hyperparams.hpp"

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace treemem::bench {

enum class Mode { tree, greedy, oracle };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// Generated scenarios, used when no scenario paths are given.
struct SuiteRequest {
    std::string family = "occlusion";
    int count = 1;
    std::uint64_t seed = 0;
    std::optional<int> num_frames;

    friend bool operator==(const SuiteRequest&, const SuiteRequest&) = default;
};

struct RunConfig {
    /// Scenario files or directories of them.
    std::vector<std::string> scenarios;
    std::optional<SuiteRequest> suite;
    Hyperparams hyperparams;
    Mode mode = Mode::tree;
    /// Greedy only: plain FIFO recency memory without gates or modulation.
    /// When false the greedy run keeps the configured memory policy and
    /// weights, isolating the effect of the tree.
    bool strict = true;
    /// "sim", "scripted:<fixture>", "replay:<trace>" or "external:<command>".
    std::string backend = "sim";
    std::string output_dir;
    int parallelism = 1;
    int segments = 4;
    /// Contour tolerance in pixels; negative picks the per-canvas default.
    int tolerance_px = -1;
    bool svg = false;
    bool step_trace = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Hyperparameters the engine actually runs with: greedy forces P = 1 and
/// turns diversification off; strict greedy also switches to recency memory,
/// drops the IoU gate and sets the weights to [1, 1].
Hyperparams effective_hyperparams(const RunConfig& config);

/// Throws ConfigError on invalid settings.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Output directory used when none is configured: $TREEMEM_OUT, else "out".
std::string default_output_dir();

}  // namespace treemem::bench
