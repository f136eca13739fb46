#include "treemem/core/hyperparams.hpp"

#include "treemem/core/errors.hpp"

#include <cmath>
#include <set>

namespace treemem {

std::string_view to_string(MemoryPolicy policy) {
    switch (policy) {
        case MemoryPolicy::object_aware: return "object_aware";
        case MemoryPolicy::recency: return "recency";
    }
    return "object_aware";
}

MemoryPolicy memory_policy_from_string(std::string_view name) {
    if (name == "object_aware") return MemoryPolicy::object_aware;
    if (name == "recency") return MemoryPolicy::recency;
    throw ConfigError("unknown memory_policy '" + std::string(name) + "'");
}

std::optional<std::string> validate(const Hyperparams& h) {
    if (h.pathways < 1) return "P ≥ 1";
    if (h.memory_frames < 1) return "N ≥ 1";
    if (!(h.epsilon > 0.0) || !std::isfinite(h.epsilon)) return "epsilon > 0";
    if (!(h.delta_conf >= 0.0) || !std::isfinite(h.delta_conf)) return "delta_conf ≥ 0";
    if (!(h.delta_iou >= 0.0 && h.delta_iou <= 1.0)) return "delta_iou in [0,1]";
    if (!(h.w_low > 0.0) || !std::isfinite(h.w_low)) return "w_low > 0";
    if (!(h.w_high >= h.w_low) || !std::isfinite(h.w_high)) return "w_high ≥ w_low";
    if (h.iou_rounding_decimals < 0) return "iou_rounding_decimals ≥ 0";
    return std::nullopt;
}

void require_valid(const Hyperparams& h) {
    if (auto err = validate(h)) throw ConfigError("invalid hyperparams: " + *err);
}

void to_json(nlohmann::json& j, const Hyperparams& h) {
    j = nlohmann::json{
        {"P", h.pathways},
        {"N", h.memory_frames},
        {"epsilon", h.epsilon},
        {"delta_conf", h.delta_conf},
        {"delta_iou", h.delta_iou},
        {"w_low", h.w_low},
        {"w_high", h.w_high},
        {"iou_rounding_decimals", h.iou_rounding_decimals},
        {"diversify", h.diversify},
        {"round_iou", h.round_iou},
        {"memory_policy", std::string(to_string(h.memory_policy))},
    };
}

void from_json(const nlohmann::json& j, Hyperparams& h) {
    if (!j.is_object()) throw ConfigError("hyperparams must be a JSON object");
    static const std::set<std::string> known = {
        "P", "N", "epsilon", "delta_conf", "delta_iou", "w_low", "w_high",
        "iou_rounding_decimals", "diversify", "round_iou", "memory_policy"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown hyperparameter '" + key + "'");
    }
    try {
        if (j.contains("P")) h.pathways = j.at("P").get<int>();
        if (j.contains("N")) h.memory_frames = j.at("N").get<int>();
        if (j.contains("epsilon")) h.epsilon = j.at("epsilon").get<double>();
        if (j.contains("delta_conf")) h.delta_conf = j.at("delta_conf").get<double>();
        if (j.contains("delta_iou")) h.delta_iou = j.at("delta_iou").get<double>();
        if (j.contains("w_low")) h.w_low = j.at("w_low").get<double>();
        if (j.contains("w_high")) h.w_high = j.at("w_high").get<double>();
        if (j.contains("iou_rounding_decimals")) {
            h.iou_rounding_decimals = j.at("iou_rounding_decimals").get<int>();
        }
        if (j.contains("diversify")) h.diversify = j.at("diversify").get<bool>();
        if (j.contains("round_iou")) h.round_iou = j.at("round_iou").get<bool>();
        if (j.contains("memory_policy")) {
            h.memory_policy = memory_policy_from_string(j.at("memory_policy").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed hyperparams: ") + e.what());
    }
}

}  // namespace treemem
