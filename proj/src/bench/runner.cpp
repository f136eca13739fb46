#include "treemem/bench/runner.hpp"

#include "treemem/backend/external_backend.hpp"
#include "treemem/backend/replay_backend.hpp"
#include "treemem/backend/scripted_backend.hpp"
#include "treemem/bench/svg.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/metrics/region.hpp"
#include "treemem/search/beam_search.hpp"
#include "treemem/search/brute_force.hpp"
#include "treemem/search/step_trace.hpp"
#include "treemem/simworld/mock_decoder.hpp"
#include "treemem/simworld/render.hpp"
#include "treemem/simworld/suite.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef TREEMEM_GIT_DESCRIBE
#define TREEMEM_GIT_DESCRIBE "unknown"
#endif

namespace treemem::bench {

using nlohmann::json;

std::string git_describe() { return TREEMEM_GIT_DESCRIBE; }

void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << body;
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename " + tmp.string() + ": " + ec.message());
}

std::vector<simworld::ScenarioSpec> resolve_scenarios(const RunConfig& config) {
    std::vector<simworld::ScenarioSpec> out;
    for (const auto& p : config.scenarios) {
        if (std::filesystem::is_directory(p)) {
            auto suite = simworld::load_suite(p);
            out.insert(out.end(), suite.begin(), suite.end());
        } else {
            out.push_back(simworld::load_scenario(p));
        }
    }
    if (config.suite) {
        simworld::SuiteOptions opt;
        opt.num_frames = config.suite->num_frames;
        auto suite = simworld::generate_scenario_suite(simworld::family_from_string(config.suite->family),
                                                       config.suite->count, config.suite->seed, opt);
        out.insert(out.end(), suite.begin(), suite.end());
    }
    if (out.empty()) throw ConfigError("no scenarios to run");
    return out;
}

std::unique_ptr<backend::DecoderBackend> make_backend(const RunConfig& config, const simworld::ScenarioSpec& spec) {
    const auto& b = config.backend;
    const auto arg = b.substr(b.find(':') + 1);
    if (b == "sim") return std::make_unique<simworld::MockDecoder>(spec);
    if (b.rfind("scripted:", 0) == 0) return std::make_unique<backend::TableBackend>(backend::TableBackend::load(arg));
    if (b.rfind("replay:", 0) == 0) return std::make_unique<backend::ReplayBackend>(backend::ReplayBackend::load(arg));
    if (b.rfind("external:", 0) == 0) return std::make_unique<backend::ExternalBackend>(backend::ExternalOptions{arg});
    throw ConfigError("unknown backend '" + b + "'");
}

namespace {

double mean_pairwise_iou(const BeamState& state) {
    const auto& leaves = state.leaves;
    double sum = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            sum += metrics::region_j(leaves[i]->record().mask, leaves[j]->record().mask);
            ++pairs;
        }
    }
    return pairs ? sum / pairs : 0.0;
}

std::string masklet_ndjson(const std::vector<ObjectOutcome>& objects) {
    std::string out;
    for (const auto& o : objects) {
        for (const auto& r : o.masklet) {
            json line{
                {"object_id", o.object_id},
                {"frame", r.frame_index},
                {"iou", r.predicted_iou},
                {"occ", r.occlusion_score},
                {"mask_rle", encode_rle(r.mask)},
            };
            out += line.dump();
            out += '\n';
        }
    }
    return out;
}

}  // namespace

ScenarioResult run_scenario(const simworld::ScenarioSpec& spec, const RunConfig& config,
                            backend::DecoderBackend& decoder) {
    const auto h = effective_hyperparams(config);
    const int last = spec.num_frames - 1;

    ScenarioResult result;
    result.name = spec.name;
    std::ostringstream steps;

    for (int oid : spec.target_ids()) {
        auto prompt = simworld::prompt_record(decoder, spec, oid);
        ObjectOutcome outcome;
        outcome.object_id = oid;
        NodePtr leaf;
        if (config.mode == Mode::oracle) {
            leaf = search::brute_force_best(oid, std::move(prompt), last, decoder, h).best;
        } else {
            search::TrackOptions opt;
            opt.on_step = [&](const BeamState& state, const search::StepTrace& trace) {
                if (trace.uncertain) {
                    ++result.uncertain_steps;
                    if (state.leaves.size() >= 2) {
                        ++result.pairwise_steps;
                        result.pairwise_iou_sum += mean_pairwise_iou(state);
                    }
                }
                if (config.step_trace) search::write_step_trace(steps, oid, trace);
            };
            leaf = search::track(oid, std::move(prompt), last, decoder, h, opt);
        }
        outcome.final_score = leaf->cumulative_score();
        outcome.masklet = search::masklet(leaf);
        result.objects.push_back(std::move(outcome));
    }
    result.steps_ndjson = steps.str();

    const auto targets = spec.target_ids();
    for (int t = 0; t <= last; ++t) {
        const auto gt = simworld::render_ground_truth(spec, t);
        double j = 0.0, f = 0.0;
        for (const auto& o : result.objects) {
            const auto s = metrics::score_frame(t, o.masklet[static_cast<std::size_t>(t)].mask, gt.mask_of(o.object_id),
                                                config.tolerance_px);
            j += s.j;
            f += s.f;
        }
        const double n = static_cast<double>(result.objects.size());
        result.frames.push_back(metrics::FrameScore::make(t, j / n, f / n));
    }
    result.summary = metrics::summarize(result.frames, config.segments);

    for (int oid : targets) {
        for (const auto& [a, b] : spec.object(oid).occlusion_windows) {
            if (!result.occlusion_end || b > *result.occlusion_end) result.occlusion_end = b;
        }
    }
    if (result.occlusion_end && *result.occlusion_end < last) {
        double sum = 0.0;
        for (int t = *result.occlusion_end + 1; t <= last; ++t) sum += result.frames[static_cast<std::size_t>(t)].jf;
        result.post_occlusion_jf = sum / (last - *result.occlusion_end);
    }
    return result;
}

json ScenarioResult::summary_json() const {
    json segments = json::array();
    for (const auto& s : summary.segments) {
        segments.push_back({{"first", s.first_time}, {"last", s.last_time}, {"j", s.j}, {"f", s.f}, {"jf", s.jf}});
    }
    json objs = json::array();
    for (const auto& o : objects) objs.push_back({{"object_id", o.object_id}, {"final_score", o.final_score}});
    json j{
        {"name", name},
        {"frames", frames.size()},
        {"mean_j", summary.mean_j},
        {"mean_f", summary.mean_f},
        {"mean_jf", summary.mean_jf},
        {"segments", segments},
        {"uncertain_steps", uncertain_steps},
        {"objects", objs},
    };
    j["post_occlusion_jf"] = post_occlusion_jf ? json(*post_occlusion_jf) : json(nullptr);
    j["occlusion_end"] = occlusion_end ? json(*occlusion_end) : json(nullptr);
    j["mean_pairwise_iou"] = pairwise_steps ? json(pairwise_iou_sum / pairwise_steps) : json(nullptr);
    return j;
}

json aggregate(const std::vector<ScenarioResult>& results) {
    double j = 0, f = 0, jf = 0, post = 0, pair_sum = 0;
    int post_n = 0, pair_n = 0;
    std::vector<double> seg;
    for (const auto& r : results) {
        j += r.summary.mean_j;
        f += r.summary.mean_f;
        jf += r.summary.mean_jf;
        if (r.post_occlusion_jf) {
            post += *r.post_occlusion_jf;
            ++post_n;
        }
        pair_sum += r.pairwise_iou_sum;
        pair_n += r.pairwise_steps;
        if (seg.size() < r.summary.segments.size()) seg.resize(r.summary.segments.size(), 0.0);
        for (std::size_t i = 0; i < r.summary.segments.size(); ++i) seg[i] += r.summary.segments[i].jf;
    }
    const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
    for (auto& s : seg) s /= n;
    json out{
        {"scenarios", results.size()},
        {"mean_j", j / n},
        {"mean_f", f / n},
        {"mean_jf", jf / n},
        {"segment_jf", seg},
    };
    out["post_occlusion_jf"] = post_n ? json(post / post_n) : json(nullptr);
    out["mean_pairwise_iou"] = pair_n ? json(pair_sum / pair_n) : json(nullptr);
    return out;
}

RunResult run_scenarios(const RunConfig& config, const std::vector<simworld::ScenarioSpec>& specs,
                        const BackendFactory& factory) {
    validate(config);
    RunResult out;
    out.scenarios.resize(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
            try {
                auto decoder = factory(specs[i]);
                out.scenarios[i] = run_scenario(specs[i], config, *decoder);
                if (!config.output_dir.empty()) {
                    const auto dir = std::filesystem::path(config.output_dir) / specs[i].name;
                    std::filesystem::create_directories(dir);
                    const auto& r = out.scenarios[i];
                    write_file_atomic(dir / "frames.csv", metrics::to_csv(r.frames));
                    write_file_atomic(dir / "summary.json", r.summary_json().dump(2) + "\n");
                    write_file_atomic(dir / "masklet.ndjson", masklet_ndjson(r.objects));
                    if (config.step_trace) write_file_atomic(dir / "steps.ndjson", r.steps_ndjson);
                    if (config.svg) {
                        Series s{to_string(config.mode), {}, {}};
                        for (const auto& fs : r.frames) {
                            s.x.push_back(fs.time);
                            s.y.push_back(fs.jf);
                        }
                        write_file_atomic(dir / "jf.svg", line_chart({s}, r.name + " per-frame J&F"));
                    }
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), specs.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    json per = json::array();
    for (const auto& r : out.scenarios) per.push_back(r.summary_json());
    // Where and on how many workers a run executed never changes its results,
    // so those settings stay out of the summary and it compares byte-for-byte.
    auto recorded = to_json(config);
    recorded.erase("output_dir");
    recorded.erase("parallelism");
    out.summary = {
        {"git_describe", git_describe()},
        {"config", recorded},
        {"effective_hyperparams", effective_hyperparams(config)},
        {"aggregate", aggregate(out.scenarios)},
        {"scenarios", per},
    };
    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        write_file_atomic(std::filesystem::path(config.output_dir) / "summary.json", out.summary.dump(2) + "\n");
    }
    return out;
}

RunResult run(const RunConfig& config) {
    validate(config);
    const auto specs = resolve_scenarios(config);
    return run_scenarios(config, specs, [&](const simworld::ScenarioSpec& s) { return make_backend(config, s); });
}

namespace {

struct RecordedSim final : backend::DecoderBackend {
    explicit RecordedSim(simworld::ScenarioSpec spec) : sim(std::move(spec)), recorder(sim) {}

    backend::DecodeResponse decode(const backend::DecodeRequest& r) override { return recorder.decode(r); }
    bool supports_concurrent_decode() const override { return recorder.supports_concurrent_decode(); }
    Bytes encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) override {
        return recorder.encode_prompt(object_id, frame_ref, mask);
    }

    simworld::MockDecoder sim;
    backend::RecordingBackend recorder;
};

}  // namespace

RunResult record(const RunConfig& config, const std::filesystem::path& trace) {
    if (config.backend != "sim") throw ConfigError("record runs the simulator backend");
    validate(config);
    const auto specs = resolve_scenarios(config);
    std::vector<std::shared_ptr<RecordedSim>> decoders;
    std::mutex mu;
    auto result = run_scenarios(config, specs, [&](const simworld::ScenarioSpec& s) {
        auto d = std::make_shared<RecordedSim>(s);
        std::lock_guard lock(mu);
        decoders.push_back(d);
        return d;
    });
    std::vector<const backend::RecordingBackend*> recorders;
    for (const auto& d : decoders) recorders.push_back(&d->recorder);
    backend::RecordingBackend::save_all(recorders, trace);
    return result;
}

}  // namespace treemem::bench
