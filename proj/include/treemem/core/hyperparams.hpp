#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace treemem {

/// How a pathway's memory bank picks its non-prompt frames.
enum class MemoryPolicy {
    object_aware,  ///< backward scan keeping frames that pass the IoU and presence gates
    recency,       ///< the N most recent frames, no gates (FIFO)
};

std::string_view to_string(MemoryPolicy policy);
MemoryPolicy memory_policy_from_string(std::string_view name);

struct Hyperparams {
    int pathways = 3;                  ///< P, live pathways per object
    int memory_frames = 6;             ///< N, max non-prompt frames in a bank
    double epsilon = 1e-10;            ///< added inside the log of the score update
    double delta_conf = 2.0;           ///< uncertainty threshold on |occlusion score|
    double delta_iou = 0.3;            ///< memory gate on predicted IoU
    double w_low = 0.95;               ///< modulation weight lower bound
    double w_high = 1.05;              ///< modulation weight upper bound
    int iou_rounding_decimals = 2;

    // Ablation switches. Defaults give the full method.
    bool diversify = true;   ///< distinct-IoU selection on uncertain steps
    bool round_iou = true;   ///< distinctness on rounded (true) or raw (false) IoU
    MemoryPolicy memory_policy = MemoryPolicy::object_aware;

    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Returns the first violated constraint (named by field), or nullopt.
std::optional<std::string> validate(const Hyperparams& h);

/// Throws ConfigError when validate() fails.
void require_valid(const Hyperparams& h);

void to_json(nlohmann::json& j, const Hyperparams& h);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, Hyperparams& h);

}  // namespace treemem
