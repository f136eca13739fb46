#pragma once

#include "treemem/bench/run_config.hpp"
#include "treemem/bench/runner.hpp"

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace treemem::bench {

enum class SweepAxis { pathways, delta_conf, delta_iou, modulation };

/// "P", "delta_conf", "delta_iou", "modulation".
SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

/// `base` with one axis value applied. Modulation values are "low:high".
/// Throws ConfigError when the value does not parse or the result is invalid.
RunConfig apply_axis(const RunConfig& base, SweepAxis axis, const std::string& value);

struct SweepRow {
    std::string value;
    nlohmann::json aggregate;
};

/// Runs the base config's scenarios once per value. Per-scenario outputs are
/// not written; when base.output_dir is set it receives sweep.csv and
/// sweep.json (and sweep.svg with base.svg).
std::vector<SweepRow> sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values);

/// axis,value,mean_j,mean_f,mean_jf,post_occlusion_jf,mean_pairwise_iou at 6 decimals;
/// missing values are left empty.
std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows);

}  // namespace treemem::bench
