#pragma once

#include "treemem/core/hyperparams.hpp"
#include "treemem/core/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace treemem::memory {

/// One bank slot: a committed node and the modulation weight its memory key
/// is scaled by. The backend applies the weight; the engine only computes it.
struct BankEntry {
    NodePtr node;
    double weight = 1.0;

    const FrameRecord& record() const { return node->record(); }
};

/// Memory conditioning one decode call. Entries ascend by frame_index; the
/// prompt record is always present.
struct MemoryBankView {
    std::vector<BankEntry> entries;
    int built_for_time = 0;
};

/// Picks the memory frames for the pathway ending at `leaf`.
///
/// With MemoryPolicy::object_aware the chain is scanned backwards from the
/// leaf, keeping records with predicted_iou > delta_iou and
/// occlusion_score > 0 until `max_frames` are accepted. With
/// MemoryPolicy::recency the `max_frames` most recent non-prompt records are
/// kept without gating. The prompt root is always appended, ungated. The
/// result is sorted by ascending frame_index.
std::vector<NodePtr> select_memory_frames(const NodePtr& leaf, int max_frames, double delta_iou,
                                          MemoryPolicy policy = MemoryPolicy::object_aware);

/// Linearly spaced weights in [w_low, w_high] assigned by ascending occlusion
/// rank: the lowest score gets w_low, the highest w_high. Equal scores keep
/// their input order, which for bank entries is ascending frame_index. A
/// single entry gets the midpoint of the bounds.
///
/// Throws DomainError on an empty list or w_low > w_high.
std::vector<double> compute_modulation_weights(std::span<const double> occlusion_scores,
                                               double w_low, double w_high);

/// select_memory_frames followed by compute_modulation_weights over the
/// selected records' occlusion scores. `target_time` must be later than the
/// leaf's frame.
MemoryBankView build_bank(const NodePtr& leaf, const Hyperparams& h, int target_time);

/// Bank construction strategy handed to the search engine.
using MemoryBuilder = std::function<MemoryBankView(const NodePtr& leaf, int target_time)>;

/// build_bank bound to a fixed set of hyperparameters.
MemoryBuilder make_memory_builder(const Hyperparams& h);

}  // namespace treemem::memory
