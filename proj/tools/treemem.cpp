// Command-line front end: run, sweep, compare, oracle-check, record, replay
// and generate. Exit codes: 0 success, 1 run error, 2 configuration error.
// Errors are reported on stderr as one JSON object.

#include "treemem/bench/compare.hpp"
#include "treemem/bench/oracle_check.hpp"
#include "treemem/bench/run_config.hpp"
#include "treemem/bench/runner.hpp"
#include "treemem/bench/sweep.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/simworld/suite.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <sstream>

using namespace treemem;
using nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::vector<std::string> scenarios;
    std::string family;
    std::optional<int> count;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
    std::string mode;
    std::optional<bool> strict;
    std::string backend;
    std::string out;
    std::optional<int> parallelism;
    std::optional<int> segments;
    std::optional<int> tolerance;
    bool svg = false;
    bool step_trace = false;

    std::optional<int> pathways;
    std::optional<int> memory_frames;
    std::optional<double> delta_conf;
    std::optional<double> delta_iou;
    std::optional<double> w_low;
    std::optional<double> w_high;
    std::optional<int> decimals;
    bool no_diversify = false;
    bool no_round = false;
    std::string memory_policy;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "Run config JSON");
    cmd->add_option("--scenario", o.scenarios, "Scenario file or directory (repeatable)");
    cmd->add_option("--family", o.family, "Generate a suite: clean, occlusion, distractor, long");
    cmd->add_option("--count", o.count, "Generated suite size");
    cmd->add_option("--seed", o.seed, "Generated suite seed");
    cmd->add_option("--frames", o.frames, "Generated suite length");
    cmd->add_option("--mode", o.mode, "tree, greedy or oracle");
    cmd->add_option("--strict", o.strict, "Greedy uses plain recency memory (true/false)");
    cmd->add_option("--backend", o.backend, "sim, scripted:<file>, replay:<file>, external:<cmd>");
    cmd->add_option("--out", o.out, "Output directory (default $TREEMEM_OUT or ./out)");
    cmd->add_option("--parallelism", o.parallelism, "Scenario workers");
    cmd->add_option("--segments", o.segments, "Temporal segments in summaries");
    cmd->add_option("--tolerance", o.tolerance, "Contour tolerance in pixels");
    cmd->add_flag("--svg", o.svg, "Write SVG curves");
    cmd->add_flag("--step-trace", o.step_trace, "Write per-step NDJSON traces");
    cmd->add_option("--P", o.pathways, "Pathways");
    cmd->add_option("--N", o.memory_frames, "Memory frames");
    cmd->add_option("--delta-conf", o.delta_conf, "Uncertainty threshold");
    cmd->add_option("--delta-iou", o.delta_iou, "Memory IoU gate");
    cmd->add_option("--w-low", o.w_low, "Modulation lower bound");
    cmd->add_option("--w-high", o.w_high, "Modulation upper bound");
    cmd->add_option("--rounding-decimals", o.decimals, "IoU rounding decimals");
    cmd->add_flag("--no-diversify", o.no_diversify, "Plain top-P on uncertain steps");
    cmd->add_flag("--no-round", o.no_round, "Distinctness on raw IoUs");
    cmd->add_option("--memory-policy", o.memory_policy, "object_aware or recency");
}

bench::RunConfig resolve(const Overrides& o) {
    bench::RunConfig c = o.config.empty() ? bench::RunConfig{} : bench::load_run_config(o.config);
    if (!o.scenarios.empty()) c.scenarios = o.scenarios;
    if (!o.family.empty() || o.count || o.seed || o.frames) {
        bench::SuiteRequest s = c.suite.value_or(bench::SuiteRequest{});
        if (!o.family.empty()) s.family = o.family;
        if (o.count) s.count = *o.count;
        if (o.seed) s.seed = *o.seed;
        if (o.frames) s.num_frames = *o.frames;
        c.suite = s;
    }
    if (!o.mode.empty()) c.mode = bench::mode_from_string(o.mode);
    if (o.strict) c.strict = *o.strict;
    if (!o.backend.empty()) c.backend = o.backend;
    if (!o.out.empty()) c.output_dir = o.out;
    if (c.output_dir.empty()) c.output_dir = bench::default_output_dir();
    if (o.parallelism) c.parallelism = *o.parallelism;
    if (o.segments) c.segments = *o.segments;
    if (o.tolerance) c.tolerance_px = *o.tolerance;
    c.svg = c.svg || o.svg;
    c.step_trace = c.step_trace || o.step_trace;

    auto& h = c.hyperparams;
    if (o.pathways) h.pathways = *o.pathways;
    if (o.memory_frames) h.memory_frames = *o.memory_frames;
    if (o.delta_conf) h.delta_conf = *o.delta_conf;
    if (o.delta_iou) h.delta_iou = *o.delta_iou;
    if (o.w_low) h.w_low = *o.w_low;
    if (o.w_high) h.w_high = *o.w_high;
    if (o.decimals) h.iou_rounding_decimals = *o.decimals;
    if (o.no_diversify) h.diversify = false;
    if (o.no_round) h.round_iou = false;
    if (!o.memory_policy.empty()) h.memory_policy = memory_policy_from_string(o.memory_policy);
    bench::validate(c);
    return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void report(const std::string& kind, const std::string& message, const std::string& field = {}) {
    json e{{"error", kind}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    std::cerr << e.dump() << '\n';
}

void print_aggregate(const bench::RunResult& r) { std::cout << r.summary.at("aggregate").dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained tree memory engine and benchmark harness"};
    app.require_subcommand(1);

    Overrides run_o, sweep_o, record_o, replay_o;
    auto* run_cmd = app.add_subcommand("run", "Track scenarios and write per-frame scores");
    add_run_options(run_cmd, run_o);

    auto* sweep_cmd = app.add_subcommand("sweep", "One summary row per hyperparameter value");
    add_run_options(sweep_cmd, sweep_o);
    std::string axis, values;
    sweep_cmd->add_option("--axis", axis, "P, delta_conf, delta_iou or modulation")->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values; modulation as low:high")->required();

    auto* compare_cmd = app.add_subcommand("compare", "Per-frame J&F gap between two runs");
    std::string run_a, run_b, compare_out;
    int compare_segments = 4;
    bool compare_svg = false;
    compare_cmd->add_option("run_a", run_a, "First run directory")->required();
    compare_cmd->add_option("run_b", run_b, "Second run directory")->required();
    compare_cmd->add_option("--out", compare_out, "Output directory");
    compare_cmd->add_option("--segments", compare_segments, "Temporal segments");
    compare_cmd->add_flag("--svg", compare_svg, "Write SVG curves");

    auto* oracle_cmd = app.add_subcommand("oracle-check", "Beam against brute-force enumeration");
    int oracle_count = 50;
    std::uint64_t oracle_seed = 1;
    bool oracle_nested = false;
    std::string oracle_out;
    oracle_cmd->add_option("--count", oracle_count, "Fixtures");
    oracle_cmd->add_option("--seed", oracle_seed, "Fixture seed");
    oracle_cmd->add_flag("--nested", oracle_nested, "Tie-free fixtures where wider beams never lose");
    oracle_cmd->add_option("--out", oracle_out, "Write the report JSON here");

    auto* record_cmd = app.add_subcommand("record", "Run on the simulator and record every decode");
    add_run_options(record_cmd, record_o);
    std::string record_trace;
    record_cmd->add_option("--trace", record_trace, "NDJSON trace to write")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Run from a recorded trace");
    add_run_options(replay_cmd, replay_o);
    std::string replay_trace;
    replay_cmd->add_option("--trace", replay_trace, "NDJSON trace to read")->required();

    auto* gen_cmd = app.add_subcommand("generate", "Write a scenario suite as JSON files");
    std::string gen_family = "occlusion", gen_out;
    int gen_count = 1;
    std::uint64_t gen_seed = 0;
    std::optional<int> gen_frames;
    gen_cmd->add_option("--family", gen_family, "clean, occlusion, distractor, long");
    gen_cmd->add_option("--count", gen_count, "Scenarios");
    gen_cmd->add_option("--seed", gen_seed, "Base seed");
    gen_cmd->add_option("--frames", gen_frames, "Length override");
    gen_cmd->add_option("--out", gen_out, "Directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report("config", e.what());
        return 2;
    }

    try {
        if (*run_cmd) {
            print_aggregate(bench::run(resolve(run_o)));
        } else if (*sweep_cmd) {
            const auto c = resolve(sweep_o);
            const auto ax = bench::sweep_axis_from_string(axis);
            std::cout << bench::sweep_csv(ax, bench::sweep(c, ax, split(values, ',')));
        } else if (*compare_cmd) {
            std::cout << bench::compare_runs(run_a, run_b, compare_out, compare_segments, compare_svg).dump(2) << '\n';
        } else if (*oracle_cmd) {
            if (oracle_count < 1) throw ConfigError("--count must be at least 1");
            const auto r = bench::oracle_check(oracle_count, oracle_seed, oracle_nested);
            const auto j = r.to_json();
            if (!oracle_out.empty()) bench::write_file_atomic(oracle_out, j.dump(2) + "\n");
            std::cout << json{{"all_match", r.all_match}, {"all_dominated", r.all_dominated},
                              {"all_monotone", r.all_monotone}, {"fixtures", r.cases.size()}}
                             .dump(2)
                      << '\n';
            const bool ok = r.all_match && r.all_dominated && (!oracle_nested || r.all_monotone);
            return ok ? 0 : 1;
        } else if (*record_cmd) {
            print_aggregate(bench::record(resolve(record_o), record_trace));
        } else if (*replay_cmd) {
            replay_o.backend = "replay:" + replay_trace;
            print_aggregate(bench::run(resolve(replay_o)));
        } else if (*gen_cmd) {
            simworld::SuiteOptions opt;
            opt.num_frames = gen_frames;
            const auto specs = simworld::generate_scenario_suite(simworld::family_from_string(gen_family), gen_count,
                                                                 gen_seed, opt);
            std::filesystem::create_directories(gen_out);
            for (const auto& s : specs) simworld::save_scenario(s, std::filesystem::path(gen_out) / (s.name + ".json"));
            std::cout << specs.size() << " scenarios written to " << gen_out << '\n';
        }
    } catch (const ConfigError& e) {
        report("config", e.what());
        return 2;
    } catch (const ParseError& e) {
        report("parse", e.what());
        return 2;
    } catch (const BackendError& e) {
        report(std::string("backend.") + std::string(to_string(e.kind())), e.what(), e.field());
        return 1;
    } catch (const DomainError& e) {
        report("domain", e.what());
        return 1;
    } catch (const std::exception& e) {
        report("run", e.what());
        return 1;
    }
    return 0;
}
