#include "treemem/backend/scripted_backend.hpp"
#include "treemem/core/counter_rng.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/search/beam_search.hpp"
#include "treemem/search/brute_force.hpp"
#include "treemem/search/step_trace.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

using namespace treemem;
using namespace treemem::search;
using backend::DecodeRequest;
using backend::DecodeResponse;

namespace {

class LambdaBackend final : public backend::DecoderBackend {
public:
    explicit LambdaBackend(std::function<DecodeResponse(const DecodeRequest&)> f) : f_(std::move(f)) {}
    DecodeResponse decode(const DecodeRequest& r) override { return f_(r); }
    bool supports_concurrent_decode() const override { return true; }

private:
    std::function<DecodeResponse(const DecodeRequest&)> f_;
};

NodePtr root4() { return PathwayNode::make_root(make_prompt_record(0, Mask(4, 4))); }

std::vector<std::pair<int, int>> identity(const std::vector<NodePtr>& nodes, const std::vector<ExpansionCandidate>& from) {
    // (parent position, candidate index) of each kept node.
    std::vector<std::pair<int, int>> out;
    for (const auto& n : nodes) {
        for (const auto& c : from) {
            if (c.parent == n->parent() && c.candidate_index == n->candidate_index() &&
                c.tentative_score == n->cumulative_score()) {
                out.emplace_back(c.parent_position, c.candidate_index);
                break;
            }
        }
    }
    return out;
}

std::vector<ExpansionCandidate> random_candidates(std::uint64_t seed, int parents) {
    CounterRng rng({seed, 0xca0dULL});
    std::vector<NodePtr> roots;
    for (int p = 0; p < parents; ++p) roots.push_back(root4());
    std::vector<ExpansionCandidate> out;
    for (int p = 0; p < parents; ++p) {
        for (int k = 0; k < 3; ++k) {
            auto c = testkit::candidate(-static_cast<double>(rng.integer(0, 6)) / 4.0,
                                        static_cast<double>(rng.integer(0, 40)) / 40.0, 1.0, p, k);
            c.parent = roots[p];
            out.push_back(c);
        }
    }
    return out;
}

backend::RandomScriptOptions script(std::uint64_t seed) {
    backend::RandomScriptOptions o;
    o.seed = seed;
    return o;
}

}  // namespace

TEST(ScoreUpdate, Examples) {
    EXPECT_NEAR(score_update(0.0, 1.0, 1e-10), 1.0e-10, 1e-15);
    EXPECT_NEAR(score_update(-0.5, 0.5, 1e-10), -1.1931472, 1e-6);
    EXPECT_NEAR(score_update(0.0, 0.0, 1e-10), -23.0258509, 1e-6);
}

TEST(ScoreUpdate, DomainErrors) {
    EXPECT_THROW(score_update(0.0, 1.2, 1e-10), DomainError);
    EXPECT_THROW(score_update(0.0, -0.1, 1e-10), DomainError);
    EXPECT_THROW(score_update(0.0, std::nan(""), 1e-10), DomainError);
    EXPECT_THROW(score_update(0.0, 0.5, 0.0), DomainError);
}

TEST(Expand, ThreeCandidatesPerLeaf) {
    LambdaBackend b([](const DecodeRequest&) { return testkit::response({0.9, 0.5, 0.1}, 3.0); });
    const std::vector<NodePtr> leaves{root4(), root4(), root4()};
    const auto out = expand(leaves, Frame::at(1), b, memory::make_memory_builder({}), {});
    ASSERT_EQ(out.size(), 9u);
    for (int i = 0; i < 9; ++i) {
        EXPECT_EQ(out[i].parent_position, i / 3);
        EXPECT_EQ(out[i].candidate_index, i % 3);
    }
}

TEST(Expand, TentativeScoresAreLogIous) {
    LambdaBackend b([](const DecodeRequest&) { return testkit::response({0.9, 0.5, 0.1}, 3.0); });
    const std::vector<NodePtr> leaves{root4()};
    const auto out = expand(leaves, Frame::at(1), b, memory::make_memory_builder({}), {});
    EXPECT_NEAR(out[0].tentative_score, -0.1054, 1e-4);
    EXPECT_NEAR(out[1].tentative_score, -0.6931, 1e-4);
    EXPECT_NEAR(out[2].tentative_score, -2.3026, 1e-4);
}

TEST(Expand, ContractViolationSurfaces) {
    LambdaBackend b([](const DecodeRequest&) { return testkit::response({0.9, 1.2, 0.1}, 3.0); });
    const std::vector<NodePtr> leaves{root4()};
    EXPECT_THROW(expand(leaves, Frame::at(1), b, memory::make_memory_builder({}), {}), DomainError);
}

TEST(Expand, BackendFailureNamesTheLeaf) {
    const auto bad = root4();
    LambdaBackend b([&](const DecodeRequest& r) {
        if (r.bank.entries.front().node == bad) throw BackendError(BackendError::Kind::decode_failed, "boom");
        return testkit::response({0.9, 0.5, 0.1}, 3.0);
    });
    const std::vector<NodePtr> leaves{root4(), bad};
    for (bool concurrent : {false, true}) {
        try {
            expand(leaves, Frame::at(1), b, memory::make_memory_builder({}), {0, 1e-10, concurrent});
            FAIL() << "expected a backend error";
        } catch (const BackendError& e) {
            EXPECT_EQ(e.kind(), BackendError::Kind::decode_failed);
            EXPECT_NE(std::string(e.what()).find("leaf 1"), std::string::npos) << e.what();
        }
    }
}

TEST(IsUncertain, Examples) {
    const std::vector<ExpansionCandidate> a{testkit::candidate(0, 0.5, 0.5), testkit::candidate(0, 0.5, -1.0),
                                            testkit::candidate(0, 0.5, 1.9)};
    EXPECT_TRUE(is_uncertain(a, 2.0));
    const std::vector<ExpansionCandidate> b{testkit::candidate(0, 0.5, 0.5), testkit::candidate(0, 0.5, -3.0)};
    EXPECT_FALSE(is_uncertain(b, 2.0));
    EXPECT_FALSE(is_uncertain(a, 0.0));
    const std::vector<ExpansionCandidate> zero{testkit::candidate(0, 0.5, 0.0)};
    EXPECT_FALSE(is_uncertain(zero, 0.0));
}

TEST(PruneTopP, KeepsHighestScores) {
    std::vector<ExpansionCandidate> c;
    int i = 0;
    for (double s : {-1.0, -2.0, -3.0, -1.5, -0.2, -4.0}) {
        c.push_back(testkit::candidate(s, 0.5, 3.0, i / 3, i % 3));
        ++i;
    }
    const auto kept = prune_top_p(c, 3);
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0]->cumulative_score(), -0.2);
    EXPECT_EQ(kept[1]->cumulative_score(), -1.0);
    EXPECT_EQ(kept[2]->cumulative_score(), -1.5);
}

TEST(PruneTopP, TiesGoToTheEarlierParent) {
    const std::vector<ExpansionCandidate> c{testkit::candidate(-1.0, 0.5, 3.0, 1, 0),
                                            testkit::candidate(-1.0, 0.5, 3.0, 0, 2)};
    const auto kept = prune_top_p(c, 1);
    EXPECT_EQ(identity(kept, c), (std::vector<std::pair<int, int>>{{0, 2}}));
}

TEST(PruneTopP, ClampsToAvailableCandidates) {
    const std::vector<ExpansionCandidate> c{testkit::candidate(-1, 0.5), testkit::candidate(-2, 0.5, 3.0, 0, 1),
                                            testkit::candidate(-3, 0.5, 3.0, 0, 2)};
    EXPECT_EQ(prune_top_p(c, 4).size(), 3u);
    EXPECT_THROW(prune_top_p(c, 0), DomainError);
}

TEST(SelectDiverse, SkipsDuplicateRoundedIou) {
    const std::vector<ExpansionCandidate> c{
        testkit::candidate(-0.1, 0.874, 1.0, 0, 0), testkit::candidate(-0.2, 0.871, 1.0, 0, 1),
        testkit::candidate(-0.3, 0.55, 1.0, 0, 2), testkit::candidate(-0.4, 0.23, 1.0, 1, 0)};
    const auto kept = select_diverse(c, 3, 2);
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0]->cumulative_score(), -0.1);
    EXPECT_EQ(kept[1]->cumulative_score(), -0.3);
    EXPECT_EQ(kept[2]->cumulative_score(), -0.4);
}

TEST(SelectDiverse, FillsShortfallByScore) {
    const std::vector<ExpansionCandidate> c{
        testkit::candidate(-0.4, 0.5, 1.0, 0, 0), testkit::candidate(-0.1, 0.5, 1.0, 0, 1),
        testkit::candidate(-0.3, 0.5, 1.0, 0, 2), testkit::candidate(-0.2, 0.5, 1.0, 1, 0)};
    const auto kept = select_diverse(c, 3, 2);
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0]->cumulative_score(), -0.1);
    EXPECT_EQ(kept[1]->cumulative_score(), -0.2);
    EXPECT_EQ(kept[2]->cumulative_score(), -0.3);
}

TEST(SelectDiverse, RoundingGranularity) {
    EXPECT_EQ(rounded_iou_key(0.4, 0), 0);
    EXPECT_EQ(rounded_iou_key(0.6, 0), 1);
    EXPECT_EQ(rounded_iou_key(0.4, 0), rounded_iou_key(0.44, 0));
    EXPECT_EQ(rounded_iou_key(0.5, 0), 0);  // half to even
    EXPECT_EQ(rounded_iou_key(1.5, 0), 2);
    EXPECT_THROW(rounded_iou_key(0.5, -1), DomainError);
}

TEST(SelectDiverse, RawKeysSeparateNearbyValues) {
    const std::vector<ExpansionCandidate> c{testkit::candidate(-0.1, 0.874, 1.0, 0, 0),
                                            testkit::candidate(-0.2, 0.871, 1.0, 0, 1),
                                            testkit::candidate(-0.3, 0.871, 1.0, 0, 2),
                                            testkit::candidate(-0.4, 0.2, 1.0, 1, 0)};
    const auto kept = select_diverse(c, 3, 2, false);
    EXPECT_EQ(kept[0]->cumulative_score(), -0.1);
    EXPECT_EQ(kept[1]->cumulative_score(), -0.2);
    EXPECT_EQ(kept[2]->cumulative_score(), -0.4);
}

TEST(SelectionProperty, PermutationInvariance) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto c = random_candidates(seed, 3);
        auto shuffled = c;
        std::mt19937_64 gen(seed);
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        for (int p = 1; p <= 5; ++p) {
            ASSERT_EQ(identity(prune_top_p(c, p), c), identity(prune_top_p(shuffled, p), c)) << seed;
            ASSERT_EQ(identity(select_diverse(c, p, 2), c), identity(select_diverse(shuffled, p, 2), c)) << seed;
        }
    }
}

TEST(SelectionProperty, DiversityLaw) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto c = random_candidates(seed, 3);
        std::set<long long> distinct;
        for (const auto& x : c) distinct.insert(rounded_iou_key(x.prediction.predicted_iou, 2));
        for (int p = 1; p <= 9; ++p) {
            const auto kept = select_diverse(c, p, 2);
            ASSERT_EQ(kept.size(), static_cast<std::size_t>(p));
            std::set<long long> got;
            for (const auto& n : kept) got.insert(rounded_iou_key(n->record().predicted_iou, 2));
            ASSERT_EQ(got.size(), std::min<std::size_t>(static_cast<std::size_t>(p), distinct.size())) << seed;
        }
    }
}

TEST(SelectionProperty, OutputIsSortedUnderTheTotalOrder) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto c = random_candidates(seed, 3);
        const auto kept = select_diverse(c, 5, 2);
        for (std::size_t i = 1; i < kept.size(); ++i) {
            ASSERT_GE(kept[i - 1]->cumulative_score(), kept[i]->cumulative_score());
        }
    }
}

TEST(Step, FirstStepFromRootFillsTheBeam) {
    backend::RandomScriptBackend b(script(1));
    const auto state = BeamState::initial(0, make_prompt_record(0, b.prompt_mask(0)));
    const auto next = step(state, Frame::at(1), b, memory::make_memory_builder({}), Hyperparams{});
    ASSERT_EQ(next.leaves.size(), 3u);
    for (const auto& leaf : next.leaves) EXPECT_EQ(leaf->parent(), state.leaves.front());
    EXPECT_EQ(next.time, 1);
}

TEST(Step, BeamWidthLaw) {
    for (int p = 1; p <= 12; ++p) {
        backend::RandomScriptBackend b(script(static_cast<std::uint64_t>(p)));
        Hyperparams h;
        h.pathways = p;
        auto state = BeamState::initial(0, make_prompt_record(0, b.prompt_mask(0)));
        for (int t = 1; t <= 4; ++t) {
            const auto prev = state.leaves.size();
            state = step(state, Frame::at(t), b, memory::make_memory_builder(h), h);
            ASSERT_EQ(state.leaves.size(), std::min<std::size_t>(static_cast<std::size_t>(p), 3 * prev));
        }
    }
}

TEST(Step, FailureLeavesTheStateUntouched) {
    LambdaBackend b([](const DecodeRequest& r) {
        if (r.time == 2) throw BackendError(BackendError::Kind::timeout, "slow");
        return testkit::response({0.9, 0.5, 0.1}, 3.0);
    });
    auto state = BeamState::initial(0, make_prompt_record(0, Mask(4, 4)));
    state = step(state, Frame::at(1), b, memory::make_memory_builder({}), Hyperparams{});
    const auto before = state.leaves;
    EXPECT_THROW(step(state, Frame::at(2), b, memory::make_memory_builder({}), Hyperparams{}), BackendError);
    EXPECT_EQ(state.leaves, before);
    EXPECT_THROW(step(state, Frame::at(1), b, memory::make_memory_builder({}), Hyperparams{}), DomainError);
}

TEST(Step, UncertainStepDiversifies) {
    // Every leaf gets IoUs (0.871, 0.874, 0.2): rounded duplicates on the top two.
    LambdaBackend b([](const DecodeRequest&) { return testkit::response({0.874, 0.871, 0.2}, 1.0); });
    StepTrace trace;
    Hyperparams h;
    h.pathways = 2;
    const auto state = BeamState::initial(0, make_prompt_record(0, Mask(4, 4)));
    step(state, Frame::at(1), b, memory::make_memory_builder(h), h, {}, &trace);
    EXPECT_TRUE(trace.uncertain);
    EXPECT_EQ(trace.candidate_indices, (std::vector<int>{0, 2}));
    h.diversify = false;
    step(state, Frame::at(1), b, memory::make_memory_builder(h), h, {}, &trace);
    EXPECT_EQ(trace.candidate_indices, (std::vector<int>{0, 1}));
}

TEST(Finalize, PicksTheBestLeaf) {
    LambdaBackend b([](const DecodeRequest&) { return testkit::response({0.82, 0.41, 0.1}, 3.0); });
    Hyperparams h;
    h.pathways = 1;
    auto state = BeamState::initial(0, make_prompt_record(0, Mask(4, 4)));
    state = step(state, Frame::at(1), b, memory::make_memory_builder(h), h);
    EXPECT_EQ(finalize(state), state.leaves.front());

    BeamState two{0, 1, {}};
    const std::vector<ExpansionCandidate> c{testkit::candidate(-0.9, 0.4, 3.0, 0, 0),
                                            testkit::candidate(-0.2, 0.8, 3.0, 0, 1)};
    two.leaves = prune_top_p(c, 2);
    EXPECT_EQ(finalize(two)->cumulative_score(), -0.2);
    EXPECT_THROW(finalize(BeamState{}), DomainError);
}

TEST(Finalize, MaskletRunsPromptToLeaf) {
    backend::RandomScriptBackend b(script(4));
    const auto leaf = track(0, make_prompt_record(0, b.prompt_mask(0)), 5, b, Hyperparams{});
    const auto records = masklet(leaf);
    ASSERT_EQ(records.size(), 6u);
    EXPECT_TRUE(records.front().is_prompt);
    for (int t = 0; t < 6; ++t) EXPECT_EQ(records[t].frame_index, t);
}

TEST(SearchProperty, ScoresNeverIncreaseAlongAPathway) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        backend::RandomScriptBackend b(script(seed));
        const auto leaf = track(0, make_prompt_record(0, b.prompt_mask(0)), 6, b, Hyperparams{});
        ASSERT_EQ(validate_chain(leaf, 1e-10), std::nullopt);
        const auto nodes = chain_of(leaf);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            ASSERT_LE(nodes[i]->cumulative_score(), nodes[i - 1]->cumulative_score() + 1e-6);
        }
    }
}

TEST(SearchProperty, TrackingIsDeterministicAndThreadIndependent) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        backend::RandomScriptBackend b(script(seed));
        const auto prompt = make_prompt_record(0, b.prompt_mask(0));
        TrackOptions concurrent;
        concurrent.step.concurrent_decode = true;
        const auto a = track(0, prompt, 7, b, Hyperparams{});
        const auto again = track(0, prompt, 7, b, Hyperparams{});
        const auto threaded = track(0, prompt, 7, b, Hyperparams{}, concurrent);
        ASSERT_EQ(masklet(a), masklet(again));
        ASSERT_EQ(masklet(a), masklet(threaded));
        ASSERT_EQ(a->cumulative_score(), threaded->cumulative_score());
    }
}

TEST(BruteForce, ZeroStepsReturnsTheRoot) {
    backend::RandomScriptBackend b(script(2));
    const auto r = brute_force_best(0, make_prompt_record(0, b.prompt_mask(0)), 0, b, Hyperparams{});
    EXPECT_TRUE(r.best->is_root());
    EXPECT_EQ(r.best->cumulative_score(), 0.0);
    EXPECT_EQ(r.pathways, 1u);
}

TEST(BruteForce, MatchesTheFullBeam) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        backend::RandomScriptBackend b(script(seed));
        const auto prompt = make_prompt_record(0, b.prompt_mask(0));
        const auto r = brute_force_best(0, prompt, 2, b, Hyperparams{});
        EXPECT_EQ(r.pathways, 9u);
        Hyperparams h;
        h.pathways = 9;
        const auto beam = track(0, prompt, 2, b, h);
        ASSERT_EQ(candidate_path(beam), candidate_path(r.best)) << seed;
        ASSERT_EQ(beam->cumulative_score(), r.best->cumulative_score()) << seed;
        for (int p = 1; p <= 4; ++p) {
            h.pathways = p;
            ASSERT_LE(track(0, prompt, 2, b, h)->cumulative_score(), r.best->cumulative_score());
        }
    }
}

TEST(BruteForce, RefusesAboveTheCap) {
    backend::RandomScriptBackend b(script(0));
    EXPECT_THROW(brute_force_best(0, make_prompt_record(0, b.prompt_mask(0)), 11, b, Hyperparams{}), ConfigError);
    EXPECT_THROW(brute_force_best(0, make_prompt_record(0, b.prompt_mask(0)), 3, b, Hyperparams{}, 26), ConfigError);
}

TEST(StrictGreedy, MatchesFifoReference) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        backend::RandomScriptOptions o = script(seed);
        o.iou_decimals = 1;
        backend::RandomScriptBackend b(o);
        Hyperparams h;
        h.pathways = 1;
        h.diversify = false;
        h.memory_policy = MemoryPolicy::recency;
        h.delta_iou = 0.0;
        h.w_low = h.w_high = 1.0;
        h.memory_frames = 3;
        const auto prompt = make_prompt_record(0, b.prompt_mask(0));
        const auto ref = testkit::fifo_reference(0, prompt, 12, b, 3);
        const auto leaf = track(0, prompt, 12, b, h);
        ASSERT_EQ(masklet(leaf), ref.records) << seed;
        const auto nodes = chain_of(leaf);
        for (std::size_t i = 0; i < nodes.size(); ++i) ASSERT_EQ(nodes[i]->cumulative_score(), ref.scores[i]);
    }
}

TEST(StepTraceJson, CarriesTheDocumentedKeys) {
    StepTrace t{3, true, {-0.1, -0.2}, {0, 0}, {1, 2}, {0.9, 0.8}};
    const auto j = step_trace_json(7, t);
    for (const char* key : {"object_id", "time", "uncertain", "leaf_scores", "leaf_ious", "parents", "candidates"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["object_id"], 7);
    EXPECT_EQ(j["candidates"], nlohmann::json({1, 2}));
}
