#pragma once

#include "treemem/backend/decoder_backend.hpp"
#include "treemem/core/hyperparams.hpp"
#include "treemem/core/types.hpp"
#include "treemem/memory/memory_bank.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace treemem::search {

/// parent_score + ln(predicted_iou + epsilon). Throws DomainError when the
/// IoU is outside [0,1] or epsilon is not positive.
double score_update(double parent_score, double predicted_iou, double epsilon);

/// A frame to decode: its index on the timeline and the backend's identifier.
struct Frame {
    int index = 0;
    std::string ref;

    static Frame at(int index) { return Frame{index, backend::frame_ref_for(index)}; }
};

/// One child hypothesis before pruning.
struct ExpansionCandidate {
    NodePtr parent;
    int parent_position = 0;  ///< parent's index in the beam being expanded
    int candidate_index = 0;  ///< 0..2 within the parent's decode call
    int frame_index = 0;      ///< frame the candidate was decoded on
    CandidatePrediction prediction;
    double tentative_score = 0.0;
};

/// The total order used for every ranking in the engine: score descending,
/// then parent beam position ascending, then candidate index ascending.
bool ranks_before(const ExpansionCandidate& a, const ExpansionCandidate& b);

struct ExpandOptions {
    int object_id = 0;
    double epsilon = 1e-10;
    /// Issue the per-leaf decode calls on separate threads when the backend
    /// allows it. Output order does not depend on this.
    bool concurrent = false;
};

/// Builds each leaf's memory bank, decodes `frame` once per leaf and wraps
/// the three candidates with tentative scores. Output is leaf-major,
/// candidate-minor. Backend and contract failures are rethrown with the
/// leaf's beam position in the message.
std::vector<ExpansionCandidate> expand(std::span<const NodePtr> leaves, const Frame& frame,
                                       backend::DecoderBackend& decoder,
                                       const memory::MemoryBuilder& memory_builder,
                                       const ExpandOptions& options);

/// True when the largest |occlusion score| over the step's decode calls is
/// below delta_conf.
bool is_uncertain(std::span<const ExpansionCandidate> candidates, double delta_conf);

/// Highest min(P, n) candidates under ranks_before, as new nodes.
std::vector<NodePtr> prune_top_p(std::span<const ExpansionCandidate> candidates, int pathways);

/// Rank-order walk keeping only candidates whose IoU key differs from every
/// kept one; shortfalls are filled from the skipped candidates in rank
/// order. The key is the IoU rounded half-to-even to `decimals` places, or
/// the raw value when `round_iou` is false. Returns min(P, n) nodes sorted
/// under ranks_before.
std::vector<NodePtr> select_diverse(std::span<const ExpansionCandidate> candidates, int pathways,
                                    int decimals, bool round_iou = true);

/// Half-to-even rounding key used by select_diverse.
long long rounded_iou_key(double iou, int decimals);

/// What one step did, for NDJSON step traces and diagnostics.
struct StepTrace {
    int time = 0;
    bool uncertain = false;
    std::vector<double> leaf_scores;
    std::vector<int> parent_positions;
    std::vector<int> candidate_indices;
    std::vector<double> leaf_ious;
};

struct StepOptions {
    bool concurrent_decode = false;
};

/// Expands every leaf on `frame`, then keeps min(P, 3 * |leaves|) children:
/// distinct-IoU selection when the step is uncertain and diversification is
/// enabled, plain top-P otherwise. The input state is never modified; on a
/// backend error nothing is returned and the caller keeps its old state.
BeamState step(const BeamState& state, const Frame& frame, backend::DecoderBackend& decoder,
               const memory::MemoryBuilder& memory_builder, const Hyperparams& h,
               const StepOptions& options = {}, StepTrace* trace = nullptr);

/// The best leaf (leaves are kept sorted, so the first). Throws DomainError
/// on an empty beam.
NodePtr finalize(const BeamState& state);

/// Records of the committed masklet, prompt first.
std::vector<FrameRecord> masklet(const NodePtr& leaf);

struct TrackOptions {
    StepOptions step;
    /// Overrides the bank builder derived from the hyperparameters.
    memory::MemoryBuilder memory_builder;
    /// Invoked after every committed step.
    std::function<void(const BeamState&, const StepTrace&)> on_step;
};

/// Runs one object's tree from its prompt frame through `last_frame`
/// inclusive and returns the finalized leaf.
NodePtr track(int object_id, FrameRecord prompt, int last_frame, backend::DecoderBackend& decoder,
              const Hyperparams& h, const TrackOptions& options = {});

}  // namespace treemem::search
