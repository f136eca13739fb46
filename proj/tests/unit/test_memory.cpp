#include "treemem/backend/decoder_backend.hpp"
#include "treemem/backend/wire.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/memory/memory_bank.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace treemem;
using memory::compute_modulation_weights;
using memory::select_memory_frames;

namespace {

std::vector<int> frames_of(const std::vector<NodePtr>& nodes) {
    std::vector<int> out;
    for (const auto& n : nodes) out.push_back(n->record().frame_index);
    return out;
}

}  // namespace

TEST(SelectMemoryFrames, NewestFirstScanWithGates) {
    // Chronological order; newest-first this is (0.9,+1) (0.2,+2) (0.8,-0.5) (0.7,+0.1).
    const auto leaf = testkit::chain({{0.7, 0.1}, {0.8, -0.5}, {0.2, 2.0}, {0.9, 1.0}});
    EXPECT_EQ(frames_of(select_memory_frames(leaf, 2, 0.3)), (std::vector<int>{0, 1, 4}));
}

TEST(SelectMemoryFrames, AllGatesFailingLeavesThePrompt) {
    const auto leaf = testkit::chain({{0.1, 1.0}, {0.9, -1.0}, {0.3, 5.0}, {0.9, 0.0}});
    EXPECT_EQ(frames_of(select_memory_frames(leaf, 6, 0.3)), (std::vector<int>{0}));
}

TEST(SelectMemoryFrames, GatesAreStrict) {
    const auto leaf = testkit::chain({{0.3, 1.0}, {0.31, 0.0}, {0.31, 0.01}});
    EXPECT_EQ(frames_of(select_memory_frames(leaf, 6, 0.3)), (std::vector<int>{0, 3}));
}

TEST(SelectMemoryFrames, RecencyIgnoresGates) {
    const auto leaf = testkit::chain({{0.1, -1.0}, {0.0, -2.0}, {0.2, 1.0}, {0.9, -3.0}});
    EXPECT_EQ(frames_of(select_memory_frames(leaf, 3, 0.3, MemoryPolicy::recency)),
              (std::vector<int>{0, 2, 3, 4}));
    EXPECT_EQ(frames_of(select_memory_frames(leaf, 9, 0.3, MemoryPolicy::recency)),
              (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(SelectMemoryFrames, PromptOnlyPathway) {
    const auto root = testkit::chain({});
    EXPECT_EQ(frames_of(select_memory_frames(root, 6, 0.3)), (std::vector<int>{0}));
}

TEST(ModulationWeights, RankBasedLinearSpacing) {
    const std::vector<double> scores{0.5, 2.0, -0.3};
    const auto w = compute_modulation_weights(scores, 0.95, 1.05);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NEAR(w[0], 1.00, 1e-12);
    EXPECT_NEAR(w[1], 1.05, 1e-12);
    EXPECT_NEAR(w[2], 0.95, 1e-12);
}

TEST(ModulationWeights, UnitBoundsDisableModulation) {
    const std::vector<double> scores{3.0, -1.0, 0.2, 7.5};
    for (double w : compute_modulation_weights(scores, 1.0, 1.0)) EXPECT_EQ(w, 1.0);
}

TEST(ModulationWeights, AscendingScoresGiveTheStandardSpacing) {
    const std::vector<double> scores{-1.0, 0.0, 1.0, 2.0, 3.0};
    const auto w = compute_modulation_weights(scores, 0.9, 1.1);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], 0.9 + 0.05 * static_cast<double>(i), 1e-12);
}

TEST(ModulationWeights, SingleEntryGetsMidpoint) {
    const std::vector<double> one{4.0};
    EXPECT_DOUBLE_EQ(compute_modulation_weights(one, 0.95, 1.05)[0], 1.0);
    EXPECT_DOUBLE_EQ(compute_modulation_weights(one, 0.8, 1.0)[0], 0.9);
}

TEST(ModulationWeights, EqualScoresKeepInputOrder) {
    const std::vector<double> scores{1.0, 1.0, 1.0};
    const auto w = compute_modulation_weights(scores, 0.9, 1.1);
    EXPECT_LT(w[0], w[1]);
    EXPECT_LT(w[1], w[2]);
}

TEST(ModulationWeights, Errors) {
    const std::vector<double> none;
    const std::vector<double> two{1.0, 2.0};
    EXPECT_THROW(compute_modulation_weights(none, 0.9, 1.1), DomainError);
    EXPECT_THROW(compute_modulation_weights(two, 1.1, 0.9), DomainError);
}

TEST(BuildBank, PromptOnlyBankHasMidpointWeight) {
    const auto bank = memory::build_bank(testkit::chain({}), Hyperparams{}, 1);
    ASSERT_EQ(bank.entries.size(), 1u);
    EXPECT_DOUBLE_EQ(bank.entries[0].weight, 1.0);
    EXPECT_EQ(bank.built_for_time, 1);
}

TEST(BuildBank, FullBankSpansTheBounds) {
    const auto leaf = testkit::chain({{0.9, 1.0}, {0.8, 2.0}, {0.7, 3.0}, {0.95, 0.5}, {0.6, 1.5}, {0.9, 2.5}, {0.99, 0.1}});
    const auto bank = memory::build_bank(leaf, Hyperparams{}, 8);
    ASSERT_EQ(bank.entries.size(), 7u);  // prompt + N = 6
    double lo = 2.0, hi = 0.0;
    for (const auto& e : bank.entries) {
        lo = std::min(lo, e.weight);
        hi = std::max(hi, e.weight);
    }
    EXPECT_NEAR(lo, 0.95, 1e-12);
    EXPECT_NEAR(hi, 1.05, 1e-12);
    // The prompt carries the largest occlusion score, so the largest weight.
    EXPECT_NEAR(bank.entries.front().weight, 1.05, 1e-12);
    EXPECT_EQ(bank.entries[1].record().frame_index, 2);
}

TEST(BuildBank, RejectsStaleTargetTime) {
    EXPECT_THROW(memory::build_bank(testkit::chain({{0.9, 1.0}}), Hyperparams{}, 1), DomainError);
}

// Bank of a fixed 7-record pathway, one wire entry per line. Set
// TREEMEM_UPDATE_GOLDEN=1 to rewrite the snapshot after a deliberate change.
TEST(BuildBank, GoldenSnapshot) {
    const auto leaf = testkit::chain(
        {{0.91, 2.5}, {0.25, 3.0}, {0.74, -0.4}, {0.66, 1.25}, {0.88, 0.75}, {0.5, 3.5}, {0.97, 0.1}});
    Hyperparams h;
    h.memory_frames = 4;
    backend::DecodeRequest request{0, 8, backend::frame_ref_for(8), memory::build_bank(leaf, h, 8)};
    const auto message = backend::wire::decode_message(request);
    std::ostringstream got;
    for (const auto& entry : message.at("bank")) got << entry.dump() << '\n';

    const auto path = std::filesystem::path(TREEMEM_GOLDEN_DIR) / "bank_snapshot.ndjson";
    if (std::getenv("TREEMEM_UPDATE_GOLDEN")) std::ofstream(path) << got.str();
    std::ifstream in(path);
    ASSERT_TRUE(in) << "missing " << path;
    std::stringstream expected;
    expected << in.rdbuf();
    EXPECT_EQ(got.str(), expected.str());
}

class MemoryProperty : public ::testing::TestWithParam<std::string (*)(std::uint64_t)> {};

TEST_P(MemoryProperty, HoldsOnSeededChains) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto failure = GetParam()(seed);
        ASSERT_TRUE(failure.empty()) << failure;
    }
}

std::string gate_name(const ::testing::TestParamInfo<MemoryProperty::ParamType>& info) {
    static const char* names[] = {"GateSoundness", "PromptInclusion", "NCap", "BackwardScan"};
    return names[info.index];
}

std::string weight_name(const ::testing::TestParamInfo<MemoryProperty::ParamType>& info) {
    static const char* names[] = {"Range", "RankAssignment", "ScaleInvariance", "UnitBoundsNoop"};
    return names[info.index];
}

INSTANTIATE_TEST_SUITE_P(Gates, MemoryProperty,
                         ::testing::Values(&testkit::check_gate_soundness, &testkit::check_prompt_inclusion,
                                           &testkit::check_n_cap, &testkit::check_backward_scan),
                         gate_name);

INSTANTIATE_TEST_SUITE_P(Weights, MemoryProperty,
                         ::testing::Values(&testkit::check_weight_range, &testkit::check_rank_assignment,
                                           &testkit::check_scale_invariance, &testkit::check_unit_bounds_noop),
                         weight_name);
