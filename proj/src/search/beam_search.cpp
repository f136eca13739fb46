#include "treemem/search/beam_search.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <unordered_set>

namespace treemem::search {

double score_update(double parent_score, double predicted_iou, double epsilon) {
    if (!(predicted_iou >= 0.0 && predicted_iou <= 1.0)) {
        throw DomainError("predicted IoU " + std::to_string(predicted_iou) + " outside [0,1]");
    }
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    return parent_score + std::log(predicted_iou + epsilon);
}

bool ranks_before(const ExpansionCandidate& a, const ExpansionCandidate& b) {
    if (a.tentative_score != b.tentative_score) return a.tentative_score > b.tentative_score;
    if (a.parent_position != b.parent_position) return a.parent_position < b.parent_position;
    return a.candidate_index < b.candidate_index;
}

namespace {

int mask_width(const memory::MemoryBankView& bank) { return bank.entries.front().record().mask.width(); }
int mask_height(const memory::MemoryBankView& bank) { return bank.entries.front().record().mask.height(); }

backend::DecodeResponse decode_leaf(const NodePtr& leaf, int position, const Frame& frame,
                                    backend::DecoderBackend& decoder,
                                    const memory::MemoryBuilder& memory_builder, int object_id) {
    const auto where = "leaf " + std::to_string(position) + " at frame " + frame.ref + ": ";
    try {
        backend::DecodeRequest request{object_id, frame.index, frame.ref, memory_builder(leaf, frame.index)};
        auto response = decoder.decode(request);
        backend::validate_response(response, mask_width(request.bank), mask_height(request.bank));
        return response;
    } catch (const BackendError& e) {
        throw BackendError(e.kind(), where + e.what(), e.field());
    } catch (const DomainError& e) {
        throw DomainError(where + e.what());
    }
}

NodePtr to_node(const ExpansionCandidate& c) {
    FrameRecord record;
    record.frame_index = c.frame_index;
    record.mask = c.prediction.mask;
    record.predicted_iou = c.prediction.predicted_iou;
    record.occlusion_score = c.prediction.occlusion_score;
    record.payload = c.prediction.payload;
    record.is_prompt = false;
    return PathwayNode::make_child(c.parent, std::move(record), c.tentative_score, c.candidate_index);
}

std::vector<const ExpansionCandidate*> ranked(std::span<const ExpansionCandidate> candidates) {
    std::vector<const ExpansionCandidate*> order;
    order.reserve(candidates.size());
    for (const auto& c : candidates) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return ranks_before(*a, *b); });
    return order;
}

}  // namespace

std::vector<ExpansionCandidate> expand(std::span<const NodePtr> leaves, const Frame& frame,
                                       backend::DecoderBackend& decoder,
                                       const memory::MemoryBuilder& memory_builder,
                                       const ExpandOptions& options) {
    const int n = static_cast<int>(leaves.size());
    std::vector<backend::DecodeResponse> responses;
    responses.reserve(leaves.size());
    if (options.concurrent && decoder.supports_concurrent_decode() && n > 1) {
        std::vector<std::future<backend::DecodeResponse>> pending;
        pending.reserve(leaves.size());
        for (int i = 0; i < n; ++i) {
            pending.push_back(std::async(std::launch::async, [&, i] {
                return decode_leaf(leaves[i], i, frame, decoder, memory_builder, options.object_id);
            }));
        }
        // Wait for every call before surfacing the first error in leaf order.
        for (auto& f : pending) f.wait();
        for (auto& f : pending) responses.push_back(f.get());
    } else {
        for (int i = 0; i < n; ++i) {
            responses.push_back(decode_leaf(leaves[i], i, frame, decoder, memory_builder, options.object_id));
        }
    }

    std::vector<ExpansionCandidate> out;
    out.reserve(leaves.size() * 3);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) {
            auto& pred = responses[i].candidates[k];
            const double score = score_update(leaves[i]->cumulative_score(), pred.predicted_iou, options.epsilon);
            out.push_back(ExpansionCandidate{leaves[i], i, k, frame.index, std::move(pred), score});
        }
    }
    return out;
}

bool is_uncertain(std::span<const ExpansionCandidate> candidates, double delta_conf) {
    if (candidates.empty()) return false;
    double confidence = 0.0;
    for (const auto& c : candidates) confidence = std::max(confidence, std::abs(c.prediction.occlusion_score));
    return confidence < delta_conf;
}

std::vector<NodePtr> prune_top_p(std::span<const ExpansionCandidate> candidates, int pathways) {
    if (pathways < 1) throw DomainError("P must be at least 1");
    const auto order = ranked(candidates);
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(pathways), order.size());
    std::vector<NodePtr> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(to_node(*order[i]));
    return out;
}

long long rounded_iou_key(double iou, int decimals) {
    if (decimals < 0) throw DomainError("rounding decimals must be non-negative");
    // nearbyint honours the default round-half-to-even mode.
    return static_cast<long long>(std::nearbyint(iou * std::pow(10.0, decimals)));
}

std::vector<NodePtr> select_diverse(std::span<const ExpansionCandidate> candidates, int pathways,
                                    int decimals, bool round_iou) {
    if (pathways < 1) throw DomainError("P must be at least 1");
    const auto order = ranked(candidates);
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(pathways), order.size());

    auto key_of = [&](double iou) -> long long {
        if (round_iou) return rounded_iou_key(iou, decimals);
        long long bits;
        const double v = iou == 0.0 ? 0.0 : iou;  // fold -0.0 onto 0.0
        std::memcpy(&bits, &v, sizeof bits);
        return bits;
    };

    std::vector<const ExpansionCandidate*> chosen;
    std::vector<const ExpansionCandidate*> skipped;
    std::unordered_set<long long> seen;
    for (const auto* c : order) {
        if (chosen.size() < keep && seen.insert(key_of(c->prediction.predicted_iou)).second) {
            chosen.push_back(c);
        } else {
            skipped.push_back(c);
        }
    }
    for (const auto* c : skipped) {
        if (chosen.size() >= keep) break;
        chosen.push_back(c);
    }
    std::sort(chosen.begin(), chosen.end(), [](const auto* a, const auto* b) { return ranks_before(*a, *b); });

    std::vector<NodePtr> out;
    out.reserve(chosen.size());
    for (const auto* c : chosen) out.push_back(to_node(*c));
    return out;
}

BeamState step(const BeamState& state, const Frame& frame, backend::DecoderBackend& decoder,
               const memory::MemoryBuilder& memory_builder, const Hyperparams& h,
               const StepOptions& options, StepTrace* trace) {
    require_valid(h);
    if (state.leaves.empty()) throw DomainError("cannot step an empty beam");
    if (frame.index <= state.time) {
        throw DomainError("frame " + std::to_string(frame.index) + " does not follow beam time " +
                          std::to_string(state.time));
    }
    auto candidates = expand(state.leaves, frame, decoder, memory_builder,
                             ExpandOptions{state.object_id, h.epsilon, options.concurrent_decode});
    const bool uncertain = is_uncertain(candidates, h.delta_conf);

    BeamState next{state.object_id, frame.index, {}};
    next.leaves = (h.diversify && uncertain)
                      ? select_diverse(candidates, h.pathways, h.iou_rounding_decimals, h.round_iou)
                      : prune_top_p(candidates, h.pathways);

    if (trace) {
        *trace = StepTrace{};
        trace->time = frame.index;
        trace->uncertain = uncertain;
        for (const auto& leaf : next.leaves) {
            trace->leaf_scores.push_back(leaf->cumulative_score());
            trace->candidate_indices.push_back(leaf->candidate_index());
            trace->leaf_ious.push_back(leaf->record().predicted_iou);
            const auto it = std::find(state.leaves.begin(), state.leaves.end(), leaf->parent());
            trace->parent_positions.push_back(static_cast<int>(it - state.leaves.begin()));
        }
    }
    return next;
}

NodePtr finalize(const BeamState& state) {
    if (state.leaves.empty()) throw DomainError("cannot finalize an empty beam");
    return state.leaves.front();
}

std::vector<FrameRecord> masklet(const NodePtr& leaf) {
    std::vector<FrameRecord> out;
    for (const auto& node : chain_of(leaf)) out.push_back(node->record());
    return out;
}

NodePtr track(int object_id, FrameRecord prompt, int last_frame, backend::DecoderBackend& decoder,
              const Hyperparams& h, const TrackOptions& options) {
    require_valid(h);
    const auto builder = options.memory_builder ? options.memory_builder : memory::make_memory_builder(h);
    auto state = BeamState::initial(object_id, std::move(prompt));
    for (int t = state.time + 1; t <= last_frame; ++t) {
        StepTrace trace;
        state = step(state, Frame::at(t), decoder, builder, h, options.step, &trace);
        if (options.on_step) options.on_step(state, trace);
    }
    return finalize(state);
}

}  // namespace treemem::search
