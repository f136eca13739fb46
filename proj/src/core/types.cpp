#include "treemem/core/types.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace treemem {

FrameRecord make_prompt_record(int frame_index, Mask mask, Bytes payload) {
    FrameRecord r;
    r.frame_index = frame_index;
    r.mask = std::move(mask);
    r.predicted_iou = 1.0;
    r.occlusion_score = kPromptOcclusionScore;
    r.payload = std::move(payload);
    r.is_prompt = true;
    return r;
}

PathwayNode::PathwayNode(Token, FrameRecord record, NodePtr parent, double score,
                         int candidate_index)
    : record_(std::move(record)),
      parent_(std::move(parent)),
      cumulative_score_(score),
      candidate_index_(candidate_index),
      depth_(parent_ ? parent_->depth_ + 1 : 0) {}

NodePtr PathwayNode::make_root(FrameRecord record) {
    if (!record.is_prompt) throw DomainError("pathway root must be a prompt record");
    return std::make_shared<const PathwayNode>(Token{}, std::move(record), nullptr, 0.0, -1);
}

NodePtr PathwayNode::make_child(NodePtr parent, FrameRecord record, double cumulative_score,
                                int candidate_index) {
    if (!parent) throw DomainError("child node requires a parent");
    if (record.is_prompt) throw DomainError("only the root may be a prompt record");
    if (record.frame_index <= parent->record().frame_index) {
        throw DomainError("frame_index must strictly increase along a pathway");
    }
    return std::make_shared<const PathwayNode>(Token{}, std::move(record), std::move(parent),
                                               cumulative_score, candidate_index);
}

std::vector<NodePtr> chain_of(const NodePtr& leaf) {
    std::vector<NodePtr> out;
    for (NodePtr n = leaf; n; n = n->parent()) out.push_back(n);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> candidate_path(const NodePtr& leaf) {
    std::vector<int> out;
    for (const PathwayNode* n = leaf.get(); n && !n->is_root(); n = n->parent().get()) {
        out.push_back(n->candidate_index());
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::string> validate_chain(const NodePtr& leaf, double epsilon) {
    if (!leaf) return "null leaf";
    for (const PathwayNode* n = leaf.get(); n; n = n->parent().get()) {
        const auto& r = n->record();
        if (n->is_root()) {
            if (!r.is_prompt) return "root is not a prompt record";
            if (n->cumulative_score() != 0.0) return "root cumulative score is not 0";
            continue;
        }
        const auto& p = *n->parent();
        if (r.is_prompt) return "non-root prompt at frame " + std::to_string(r.frame_index);
        if (r.frame_index <= p.record().frame_index) {
            return "frame_index does not increase at frame " + std::to_string(r.frame_index);
        }
        const double expected = p.cumulative_score() + std::log(r.predicted_iou + epsilon);
        if (n->cumulative_score() != expected) {
            return "score recurrence broken at frame " + std::to_string(r.frame_index);
        }
    }
    return std::nullopt;
}

BeamState BeamState::initial(int object_id, FrameRecord prompt) {
    BeamState s;
    s.object_id = object_id;
    s.time = prompt.frame_index;
    s.leaves.push_back(PathwayNode::make_root(std::move(prompt)));
    return s;
}

}  // namespace treemem
