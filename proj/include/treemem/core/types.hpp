#pragma once

#include "treemem/core/mask.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace treemem {

/// Opaque memory features owned by a decoder backend. The engine stores and
/// forwards them but never inspects them.
using Bytes = std::vector<std::uint8_t>;

/// Occlusion score carried by prompt records: the largest finite double, so
/// the prompt sorts last in ascending occlusion order.
inline constexpr double kPromptOcclusionScore = std::numeric_limits<double>::max();

/// One decoder proposal. The three candidates of a single decode call share
/// their occlusion score.
struct CandidatePrediction {
    Mask mask;
    double predicted_iou = 0.0;
    double occlusion_score = 0.0;
    Bytes payload;

    friend bool operator==(const CandidatePrediction&, const CandidatePrediction&) = default;
};

/// One committed step on a pathway.
struct FrameRecord {
    int frame_index = 0;
    Mask mask;
    double predicted_iou = 1.0;
    double occlusion_score = kPromptOcclusionScore;
    Bytes payload;
    bool is_prompt = false;

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// Builds the root record for a prompted frame.
FrameRecord make_prompt_record(int frame_index, Mask mask, Bytes payload = {});

class PathwayNode;
using NodePtr = std::shared_ptr<const PathwayNode>;

/// Immutable tree node. A pathway is the chain from a leaf back to the root;
/// pathways share their common prefixes.
class PathwayNode {
public:
    static NodePtr make_root(FrameRecord record);

    /// `cumulative_score` must equal parent score + log(iou + epsilon); the
    /// search module computes it, validate_chain() re-checks it.
    static NodePtr make_child(NodePtr parent, FrameRecord record, double cumulative_score,
                              int candidate_index);

    const FrameRecord& record() const noexcept { return record_; }
    const NodePtr& parent() const noexcept { return parent_; }
    double cumulative_score() const noexcept { return cumulative_score_; }
    /// Index (0..2) of the decoder candidate this node committed; -1 at the root.
    int candidate_index() const noexcept { return candidate_index_; }
    /// Number of edges to the root.
    int depth() const noexcept { return depth_; }
    bool is_root() const noexcept { return parent_ == nullptr; }

private:
    struct Token {};

public:
    PathwayNode(Token, FrameRecord record, NodePtr parent, double score, int candidate_index);

private:
    FrameRecord record_;
    NodePtr parent_;
    double cumulative_score_;
    int candidate_index_;
    int depth_;
};

/// Root-first list of nodes on the pathway ending at `leaf`.
std::vector<NodePtr> chain_of(const NodePtr& leaf);

/// Root-first candidate indices (root excluded) identifying a pathway.
std::vector<int> candidate_path(const NodePtr& leaf);

/// Checks every node from `leaf` up to the root: frame indices strictly
/// increase, only the root is a prompt, the root scores 0, and each child's
/// score equals parent + log(iou + epsilon) bit-for-bit. Returns the first
/// violation, or nullopt when the chain is sound.
std::optional<std::string> validate_chain(const NodePtr& leaf, double epsilon);

/// Live leaves of one object's tree at a given time.
struct BeamState {
    int object_id = 0;
    int time = 0;
    std::vector<NodePtr> leaves;

    /// Single-root beam at the prompt frame.
    static BeamState initial(int object_id, FrameRecord prompt);
};

}  // namespace treemem
