#pragma once

#include "treemem/metrics/series.hpp"

#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace treemem::bench {

struct GapSeries {
    std::vector<int> time;
    std::vector<double> gap;  ///< jf_a(t) - jf_b(t)
    std::vector<double> segment_gaps;
    double mean_gap = 0.0;
};

/// Throws DomainError when the series differ in length or frame times.
GapSeries compare_series(std::span<const metrics::FrameScore> a, std::span<const metrics::FrameScore> b,
                         int segment_count);

/// `time,gap` at 6 decimals.
std::string gap_csv(const GapSeries& gaps);

/// True when every segment gap is at least the previous one.
bool non_decreasing(const std::vector<double>& segment_gaps);

/// Compares two run output directories scenario by scenario. Both must hold
/// the same scenario set. Writes <out>/<scenario>.gap.csv and
/// <out>/compare.json when `out` is non-empty; returns the JSON summary.
/// Throws DomainError on mismatched runs.
nlohmann::json compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                            const std::filesystem::path& out, int segment_count, bool svg = false);

}  // namespace treemem::bench
