#include "treemem/memory/memory_bank.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace treemem::memory {

std::vector<NodePtr> select_memory_frames(const NodePtr& leaf, int max_frames, double delta_iou,
                                          MemoryPolicy policy) {
    if (!leaf) throw DomainError("select_memory_frames: null pathway");
    std::vector<NodePtr> picked;
    NodePtr root;
    int accepted = 0;
    for (NodePtr n = leaf; n; n = n->parent()) {
        if (n->is_root()) {
            root = n;
            break;
        }
        if (accepted >= max_frames) continue;
        const auto& r = n->record();
        const bool keep = policy == MemoryPolicy::recency ||
                          (r.predicted_iou > delta_iou && r.occlusion_score > 0.0);
        if (keep) {
            picked.push_back(n);
            ++accepted;
        }
    }
    picked.push_back(root);
    std::reverse(picked.begin(), picked.end());
    return picked;
}

std::vector<double> compute_modulation_weights(std::span<const double> occlusion_scores,
                                               double w_low, double w_high) {
    const auto m = occlusion_scores.size();
    if (m == 0) throw DomainError("compute_modulation_weights: empty score list");
    if (!(w_low <= w_high)) throw DomainError("compute_modulation_weights: w_low > w_high");
    if (m == 1) return {std::midpoint(w_low, w_high)};

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return occlusion_scores[a] < occlusion_scores[b];
    });

    std::vector<double> weights(m);
    const double span = static_cast<double>(m - 1);
    for (std::size_t rank = 0; rank < m; ++rank) {
        weights[order[rank]] = std::lerp(w_low, w_high, static_cast<double>(rank) / span);
    }
    return weights;
}

MemoryBankView build_bank(const NodePtr& leaf, const Hyperparams& h, int target_time) {
    if (!leaf) throw DomainError("build_bank: null pathway");
    if (leaf->record().frame_index >= target_time) {
        throw DomainError("build_bank: pathway ends at frame " +
                          std::to_string(leaf->record().frame_index) +
                          ", not before target time " + std::to_string(target_time));
    }
    auto nodes = select_memory_frames(leaf, h.memory_frames, h.delta_iou, h.memory_policy);

    std::vector<double> occ;
    occ.reserve(nodes.size());
    for (const auto& n : nodes) occ.push_back(n->record().occlusion_score);
    const auto weights = compute_modulation_weights(occ, h.w_low, h.w_high);

    MemoryBankView bank;
    bank.built_for_time = target_time;
    bank.entries.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        bank.entries.push_back(BankEntry{std::move(nodes[i]), weights[i]});
    }
    return bank;
}

MemoryBuilder make_memory_builder(const Hyperparams& h) {
    return [h](const NodePtr& leaf, int target_time) { return build_bank(leaf, h, target_time); };
}

}  // namespace treemem::memory
