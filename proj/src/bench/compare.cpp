#include "treemem/bench/compare.hpp"

#include "treemem/bench/runner.hpp"
#include "treemem/bench/svg.hpp"
#include "treemem/core/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace treemem::bench {

GapSeries compare_series(std::span<const metrics::FrameScore> a, std::span<const metrics::FrameScore> b,
                         int segment_count) {
    if (a.size() != b.size()) throw DomainError("compared runs have different frame counts");
    if (a.empty()) throw DomainError("compared runs are empty");
    GapSeries g;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].time != b[i].time) throw DomainError("compared runs have different frame times");
        g.time.push_back(a[i].time);
        g.gap.push_back(a[i].jf - b[i].jf);
        g.mean_gap += g.gap.back();
    }
    g.mean_gap /= static_cast<double>(a.size());
    for (const auto& [begin, end] : metrics::segment_bounds(static_cast<int>(a.size()), segment_count)) {
        double sum = 0.0;
        for (int i = begin; i < end; ++i) sum += g.gap[static_cast<std::size_t>(i)];
        g.segment_gaps.push_back(sum / (end - begin));
    }
    return g;
}

std::string gap_csv(const GapSeries& g) {
    std::string out = "time,gap\n";
    char row[64];
    for (std::size_t i = 0; i < g.time.size(); ++i) {
        std::snprintf(row, sizeof row, "%d,%.6f\n", g.time[i], g.gap[i]);
        out += row;
    }
    return out;
}

bool non_decreasing(const std::vector<double>& s) {
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] < s[i - 1]) return false;
    }
    return true;
}

namespace {

std::set<std::string> scenario_dirs(const std::filesystem::path& run) {
    if (!std::filesystem::is_directory(run)) throw DomainError(run.string() + " is not a run directory");
    std::set<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(run)) {
        if (e.is_directory() && std::filesystem::exists(e.path() / "frames.csv")) out.insert(e.path().filename().string());
    }
    return out;
}

std::vector<metrics::FrameScore> read_frames(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DomainError("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return metrics::parse_csv(ss.str());
}

}  // namespace

nlohmann::json compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                            const std::filesystem::path& out, int segment_count, bool svg) {
    const auto a = scenario_dirs(run_a);
    const auto b = scenario_dirs(run_b);
    if (a != b) throw DomainError("compared runs cover different scenarios");
    if (a.empty()) throw DomainError("no scenario outputs in " + run_a.string());
    if (!out.empty()) std::filesystem::create_directories(out);

    nlohmann::json rows = nlohmann::json::array();
    int monotone = 0;
    double mean_gap = 0.0;
    for (const auto& name : a) {
        const auto fa = read_frames(run_a / name / "frames.csv");
        const auto fb = read_frames(run_b / name / "frames.csv");
        const auto g = compare_series(fa, fb, segment_count);
        const bool mono = non_decreasing(g.segment_gaps);
        monotone += mono ? 1 : 0;
        mean_gap += g.mean_gap;
        rows.push_back({{"name", name}, {"mean_gap", g.mean_gap}, {"segment_gaps", g.segment_gaps},
                        {"non_decreasing", mono}});
        if (!out.empty()) {
            write_file_atomic(out / (name + ".gap.csv"), gap_csv(g));
            if (svg) {
                Series sa{"a", {}, {}}, sb{"b", {}, {}};
                for (std::size_t i = 0; i < fa.size(); ++i) {
                    sa.x.push_back(fa[i].time);
                    sa.y.push_back(fa[i].jf);
                    sb.x.push_back(fb[i].time);
                    sb.y.push_back(fb[i].jf);
                }
                write_file_atomic(out / (name + ".svg"), line_chart({sa, sb}, name + " per-frame J&F"));
            }
        }
    }
    nlohmann::json summary{
        {"run_a", run_a.string()},
        {"run_b", run_b.string()},
        {"scenarios", rows},
        {"mean_gap", mean_gap / static_cast<double>(a.size())},
        {"non_decreasing_fraction", static_cast<double>(monotone) / static_cast<double>(a.size())},
    };
    if (!out.empty()) write_file_atomic(out / "compare.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace treemem::bench
