#pragma once

#include "treemem/backend/decoder_backend.hpp"
#include "treemem/bench/run_config.hpp"
#include "treemem/metrics/series.hpp"
#include "treemem/simworld/scenario.hpp"

#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace treemem::bench {

struct ObjectOutcome {
    int object_id = 0;
    double final_score = 0.0;
    std::vector<FrameRecord> masklet;
};

struct ScenarioResult {
    std::string name;
    /// Per-frame scores averaged over the scenario's targets, prompt frame included.
    std::vector<metrics::FrameScore> frames;
    metrics::Summary summary;
    /// Last hidden frame of the latest target occlusion window, if any.
    std::optional<int> occlusion_end;
    /// Mean J&F over the frames after occlusion_end.
    std::optional<double> post_occlusion_jf;
    /// Steps flagged uncertain, and the mean over those steps of the mean
    /// pairwise IoU between the selected pathways' new masks.
    int uncertain_steps = 0;
    int pairwise_steps = 0;
    double pairwise_iou_sum = 0.0;
    std::vector<ObjectOutcome> objects;
    std::string steps_ndjson;

    nlohmann::json summary_json() const;
};

using BackendFactory = std::function<std::shared_ptr<backend::DecoderBackend>(const simworld::ScenarioSpec&)>;

/// Scenario files and directories from the config, then the generated suite.
std::vector<simworld::ScenarioSpec> resolve_scenarios(const RunConfig& config);

/// Backend named by config.backend for one scenario.
std::unique_ptr<backend::DecoderBackend> make_backend(const RunConfig& config,
                                                      const simworld::ScenarioSpec& spec);

/// Tracks every target of `spec` and scores the committed masklets against
/// the scenario's ground truth.
ScenarioResult run_scenario(const simworld::ScenarioSpec& spec, const RunConfig& config,
                            backend::DecoderBackend& decoder);

struct RunResult {
    std::vector<ScenarioResult> scenarios;
    nlohmann::json summary;
};

/// Runs all scenarios on `config.parallelism` workers. Results keep scenario
/// order whatever the worker count. The first failing scenario's error is
/// rethrown after all workers stop.
RunResult run_scenarios(const RunConfig& config, const std::vector<simworld::ScenarioSpec>& specs,
                        const BackendFactory& factory);

/// resolve_scenarios + run_scenarios with make_backend, writing outputs
/// when config.output_dir is set:
///   <out>/summary.json                 resolved config, git describe, aggregates
///   <out>/<scenario>/frames.csv        time,j,f,jf
///   <out>/<scenario>/summary.json
///   <out>/<scenario>/masklet.ndjson    one committed record per line
///   <out>/<scenario>/steps.ndjson      with step_trace
///   <out>/<scenario>/jf.svg            with svg
RunResult run(const RunConfig& config);

/// run() over the simulator with every decode recorded into one trace.
RunResult record(const RunConfig& config, const std::filesystem::path& trace);

/// Aggregate means across scenarios.
nlohmann::json aggregate(const std::vector<ScenarioResult>& results);

/// Writes `body` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& body);

/// Version string baked in at build time.
std::string git_describe();

}  // namespace treemem::bench
