#include "treemem/bench/oracle_check.hpp"

#include "treemem/search/beam_search.hpp"
#include "treemem/search/brute_force.hpp"

#include <bit>

namespace treemem::bench {

std::vector<OracleFixture> oracle_fixtures(int count, std::uint64_t seed, bool nested) {
    std::vector<OracleFixture> out;
    for (int i = 0; i < count; ++i) {
        OracleFixture f;
        f.steps = 3 + i % 6;
        f.options.seed = seed * 1000 + static_cast<std::uint64_t>(i);
        if (nested) {
            f.options.iou_decimals = -1;
            f.options.path_dependent_iou = false;
            f.options.occ_min_abs = 6.0;
            f.options.occ_max_abs = 8.0;
        }
        out.push_back(f);
    }
    return out;
}

OracleCase check_fixture(const OracleFixture& fixture, const Hyperparams& h) {
    backend::RandomScriptBackend decoder(fixture.options);
    const auto prompt = make_prompt_record(0, decoder.prompt_mask(0));
    const int last = fixture.steps;

    OracleCase c;
    c.seed = fixture.options.seed;
    c.steps = fixture.steps;
    const auto oracle = search::brute_force_best(0, prompt, last, decoder, h).best;
    c.oracle_score = oracle->cumulative_score();

    Hyperparams full = h;
    full.pathways = 1;
    for (int i = 0; i < fixture.steps; ++i) full.pathways *= 3;
    const auto leaf = search::track(0, prompt, last, decoder, full);
    c.full_beam_score = leaf->cumulative_score();
    c.full_beam_matches = candidate_path(leaf) == candidate_path(oracle) &&
                          std::bit_cast<std::uint64_t>(c.full_beam_score) ==
                              std::bit_cast<std::uint64_t>(c.oracle_score);

    c.dominated = true;
    c.monotone = true;
    for (int p = 1; p <= 4; ++p) {
        Hyperparams hp = h;
        hp.pathways = p;
        const double s = search::track(0, prompt, last, decoder, hp)->cumulative_score();
        if (s > c.oracle_score) c.dominated = false;
        if (!c.beam_scores.empty() && s < c.beam_scores.back()) c.monotone = false;
        c.beam_scores.push_back(s);
    }
    return c;
}

OracleReport oracle_check(int count, std::uint64_t seed, bool nested, const Hyperparams& h) {
    OracleReport r;
    for (const auto& f : oracle_fixtures(count, seed, nested)) {
        r.cases.push_back(check_fixture(f, h));
        const auto& c = r.cases.back();
        r.all_match = r.all_match && c.full_beam_matches;
        r.all_dominated = r.all_dominated && c.dominated;
        r.all_monotone = r.all_monotone && c.monotone;
    }
    return r;
}

nlohmann::json OracleReport::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cases) {
        cs.push_back({{"seed", c.seed},
                      {"steps", c.steps},
                      {"oracle_score", c.oracle_score},
                      {"full_beam_score", c.full_beam_score},
                      {"full_beam_matches", c.full_beam_matches},
                      {"beam_scores", c.beam_scores},
                      {"dominated", c.dominated},
                      {"monotone", c.monotone}});
    }
    return {{"all_match", all_match}, {"all_dominated", all_dominated}, {"all_monotone", all_monotone},
            {"cases", cs}};
}

}  // namespace treemem::bench
