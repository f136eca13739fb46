#include "treemem/search/brute_force.hpp"

#include "treemem/core/errors.hpp"
#include "treemem/search/beam_search.hpp"

#include <functional>

namespace treemem::search {

bool pathway_ranks_before(const NodePtr& a, const NodePtr& b) {
    const auto ca = chain_of(a);
    const auto cb = chain_of(b);
    if (ca.size() != cb.size()) throw DomainError("pathways of different lengths");
    // Scores compared deepest level first, then candidate indices root first.
    for (auto i = ca.size(); i-- > 1;) {
        const double sa = ca[i]->cumulative_score();
        const double sb = cb[i]->cumulative_score();
        if (sa != sb) return sa > sb;
    }
    for (std::size_t i = 1; i < ca.size(); ++i) {
        const int ka = ca[i]->candidate_index();
        const int kb = cb[i]->candidate_index();
        if (ka != kb) return ka < kb;
    }
    return false;
}

BruteForceResult brute_force_best(int object_id, FrameRecord prompt, int last_frame,
                                  backend::DecoderBackend& decoder, const Hyperparams& h,
                                  std::uint64_t cap) {
    require_valid(h);
    const int first = prompt.frame_index + 1;
    const int steps = last_frame - prompt.frame_index;
    if (steps < 0) throw DomainError("last frame precedes the prompt");
    std::uint64_t total = 1;
    for (int i = 0; i < steps; ++i) {
        total *= 3;
        if (total > cap) {
            throw ConfigError("brute force over " + std::to_string(steps) +
                              " frames exceeds the pathway cap of " + std::to_string(cap));
        }
    }

    const auto builder = memory::make_memory_builder(h);
    BruteForceResult result;
    std::function<void(const NodePtr&, int)> walk = [&](const NodePtr& node, int t) {
        if (t > last_frame) {
            ++result.pathways;
            if (!result.best || pathway_ranks_before(node, result.best)) result.best = node;
            return;
        }
        const NodePtr leaves[] = {node};
        auto candidates = expand(leaves, Frame::at(t), decoder, builder,
                                 ExpandOptions{object_id, h.epsilon, false});
        for (auto& c : candidates) {
            FrameRecord record;
            record.frame_index = t;
            record.mask = std::move(c.prediction.mask);
            record.predicted_iou = c.prediction.predicted_iou;
            record.occlusion_score = c.prediction.occlusion_score;
            record.payload = std::move(c.prediction.payload);
            walk(PathwayNode::make_child(node, std::move(record), c.tentative_score, c.candidate_index), t + 1);
        }
    };
    walk(PathwayNode::make_root(std::move(prompt)), first);
    return result;
}

}  // namespace treemem::search
