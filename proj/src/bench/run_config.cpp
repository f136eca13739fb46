#include "treemem/bench/run_config.hpp"

#include "treemem/core/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace treemem::bench {

using nlohmann::json;

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::tree: return "tree";
        case Mode::greedy: return "greedy";
        case Mode::oracle: return "oracle";
    }
    return "tree";
}

Mode mode_from_string(const std::string& name) {
    if (name == "tree") return Mode::tree;
    if (name == "greedy") return Mode::greedy;
    if (name == "oracle") return Mode::oracle;
    throw ConfigError("unknown mode '" + name + "' (tree, greedy, oracle)");
}

Hyperparams effective_hyperparams(const RunConfig& c) {
    Hyperparams h = c.hyperparams;
    if (c.mode == Mode::greedy) {
        h.pathways = 1;
        h.diversify = false;
        if (c.strict) {
            h.memory_policy = MemoryPolicy::recency;
            h.delta_iou = 0.0;
            h.w_low = 1.0;
            h.w_high = 1.0;
        }
    }
    return h;
}

void validate(const RunConfig& c) {
    if (auto err = treemem::validate(c.hyperparams)) throw ConfigError("hyperparams: " + *err);
    if (c.scenarios.empty() && !c.suite) throw ConfigError("no scenarios: give scenario paths or a suite");
    if (c.suite && c.suite->count < 1) throw ConfigError("suite count must be at least 1");
    if (c.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (c.segments < 1) throw ConfigError("segments must be at least 1");
    const auto& b = c.backend;
    const bool known = b == "sim" || b.rfind("scripted:", 0) == 0 || b.rfind("replay:", 0) == 0 ||
                       b.rfind("external:", 0) == 0;
    if (!known) throw ConfigError("unknown backend '" + b + "'");
    if (b.find(':') != std::string::npos && b.size() == b.find(':') + 1) {
        throw ConfigError("backend '" + b + "' needs an argument");
    }
}

json to_json(const RunConfig& c) {
    json h;
    to_json(h, c.hyperparams);
    json j{
        {"scenarios", c.scenarios},
        {"hyperparams", h},
        {"mode", to_string(c.mode)},
        {"strict", c.strict},
        {"backend", c.backend},
        {"output_dir", c.output_dir},
        {"parallelism", c.parallelism},
        {"segments", c.segments},
        {"tolerance_px", c.tolerance_px},
        {"svg", c.svg},
        {"step_trace", c.step_trace},
    };
    if (c.suite) {
        json s{{"family", c.suite->family}, {"count", c.suite->count}, {"seed", c.suite->seed}};
        if (c.suite->num_frames) s["num_frames"] = *c.suite->num_frames;
        j["suite"] = s;
    }
    return j;
}

RunConfig run_config_from_json(const json& j) {
    static const std::set<std::string> known{"scenarios", "suite",  "hyperparams",  "mode",
                                             "strict",    "backend", "output_dir",  "parallelism",
                                             "segments",  "tolerance_px", "svg",    "step_trace"};
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown run config key '" + key + "'");
    }
    RunConfig c;
    try {
        c.scenarios = j.value("scenarios", c.scenarios);
        if (j.contains("suite")) {
            const auto& s = j.at("suite");
            SuiteRequest r;
            r.family = s.value("family", r.family);
            r.count = s.value("count", r.count);
            r.seed = s.value("seed", r.seed);
            if (s.contains("num_frames")) r.num_frames = s.at("num_frames").get<int>();
            c.suite = r;
        }
        if (j.contains("hyperparams")) c.hyperparams = j.at("hyperparams").get<Hyperparams>();
        if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
        c.strict = j.value("strict", c.strict);
        c.backend = j.value("backend", c.backend);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.parallelism = j.value("parallelism", c.parallelism);
        c.segments = j.value("segments", c.segments);
        c.tolerance_px = j.value("tolerance_px", c.tolerance_px);
        c.svg = j.value("svg", c.svg);
        c.step_trace = j.value("step_trace", c.step_trace);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed run config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

std::string default_output_dir() {
    if (const char* env = std::getenv("TREEMEM_OUT"); env && *env) return env;
    return "out";
}

}  // namespace treemem::bench
