#include "fixtures.hpp"

#include "treemem/core/counter_rng.hpp"
#include "treemem/memory/memory_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace treemem::testkit {

Mask box(int width, int height, int x0, int y0, int x1, int y1) {
    Mask m(width, height);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    }
    return m;
}

backend::DecodeResponse response(std::array<double, 3> ious, double occ, int width, int height) {
    backend::DecodeResponse r;
    for (int k = 0; k < 3; ++k) {
        r.candidates[k].mask = box(width, height, 0, 0, k, 0);
        r.candidates[k].predicted_iou = ious[k];
        r.candidates[k].occlusion_score = occ;
        r.candidates[k].payload = {static_cast<std::uint8_t>(k)};
    }
    return r;
}

search::ExpansionCandidate candidate(double score, double iou, double occ, int parent_position,
                                     int candidate_index) {
    static const NodePtr root = PathwayNode::make_root(make_prompt_record(0, Mask(4, 4)));
    search::ExpansionCandidate c;
    c.parent = root;
    c.parent_position = parent_position;
    c.candidate_index = candidate_index;
    c.frame_index = 1;
    c.prediction.mask = Mask(4, 4);
    c.prediction.predicted_iou = iou;
    c.prediction.occlusion_score = occ;
    c.tentative_score = score;
    return c;
}

NodePtr chain(const std::vector<std::pair<double, double>>& records) {
    NodePtr node = PathwayNode::make_root(make_prompt_record(0, box(4, 4, 0, 0, 1, 1)));
    int t = 0;
    for (const auto& [iou, occ] : records) {
        ++t;
        FrameRecord r;
        r.frame_index = t;
        r.mask = box(4, 4, t % 4, 0, t % 4, 3);
        r.predicted_iou = iou;
        r.occlusion_score = occ;
        r.payload = {static_cast<std::uint8_t>(t)};
        const double score = node->cumulative_score() + std::log(iou + 1e-10);
        node = PathwayNode::make_child(node, std::move(r), score, 0);
    }
    return node;
}

FifoTrack fifo_reference(int object_id, FrameRecord prompt, int last_frame, backend::DecoderBackend& decoder,
                         int memory_frames, double epsilon) {
    FifoTrack out;
    out.records.push_back(std::move(prompt));
    out.scores.push_back(0.0);
    // The request carries nodes, so keep a parallel list of them.
    std::vector<NodePtr> nodes{PathwayNode::make_root(out.records.front())};

    for (int t = out.records.front().frame_index + 1; t <= last_frame; ++t) {
        backend::DecodeRequest request;
        request.object_id = object_id;
        request.time = t;
        request.frame_ref = backend::frame_ref_for(t);
        request.bank.built_for_time = t;
        request.bank.entries.push_back({nodes.front(), 1.0});
        const int n = static_cast<int>(nodes.size()) - 1;
        for (int i = std::max(1, n - memory_frames + 1); i <= n; ++i) request.bank.entries.push_back({nodes[i], 1.0});

        const auto reply = decoder.decode(request);
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            if (reply.candidates[k].predicted_iou > reply.candidates[best].predicted_iou) best = k;
        }
        const auto& c = reply.candidates[best];
        FrameRecord r{t, c.mask, c.predicted_iou, c.occlusion_score, c.payload, false};
        const double score = out.scores.back() + std::log(c.predicted_iou + epsilon);
        nodes.push_back(PathwayNode::make_child(nodes.back(), r, score, best));
        out.records.push_back(std::move(r));
        out.scores.push_back(score);
    }
    return out;
}

NodePtr random_chain(std::uint64_t seed, int max_length) {
    CounterRng rng({seed, 0x6d656dULL});
    const int length = static_cast<int>(rng.integer(0, max_length));
    std::vector<std::pair<double, double>> records;
    for (int i = 0; i < length; ++i) {
        // Coarse values so gate boundaries and equal scores are hit often.
        const double iou = static_cast<double>(rng.integer(0, 10)) / 10.0;
        const double occ = static_cast<double>(rng.integer(-6, 6)) / 2.0;
        records.emplace_back(iou, occ);
    }
    return chain(records);
}

namespace {

struct Drawn {
    NodePtr leaf;
    int n = 0;
    double delta_iou = 0.0;
};

Drawn draw(std::uint64_t seed) {
    CounterRng rng({seed, 0x706172ULL});
    return {random_chain(seed), static_cast<int>(rng.integer(1, 8)),
            static_cast<double>(rng.integer(0, 10)) / 10.0};
}

std::vector<double> random_scores(std::uint64_t seed) {
    CounterRng rng({seed, 0x6f6363ULL});
    std::vector<double> s(static_cast<std::size_t>(rng.integer(1, 9)));
    for (auto& v : s) v = static_cast<double>(rng.integer(-8, 8)) / 4.0;
    return s;
}

std::string where(std::uint64_t seed) { return " (seed " + std::to_string(seed) + ")"; }

}  // namespace

std::string check_gate_soundness(std::uint64_t seed) {
    const auto d = draw(seed);
    for (const auto& node : memory::select_memory_frames(d.leaf, d.n, d.delta_iou)) {
        const auto& r = node->record();
        if (r.is_prompt) continue;
        if (!(r.predicted_iou > d.delta_iou) || !(r.occlusion_score > 0.0)) {
            return "frame " + std::to_string(r.frame_index) + " passed a failing gate" + where(seed);
        }
    }
    return {};
}

std::string check_prompt_inclusion(std::uint64_t seed) {
    const auto d = draw(seed);
    const auto sel = memory::select_memory_frames(d.leaf, d.n, d.delta_iou);
    const auto prompts = std::count_if(sel.begin(), sel.end(), [](const NodePtr& n) { return n->record().is_prompt; });
    if (prompts != 1 || !sel.front()->record().is_prompt) return "prompt missing or repeated" + where(seed);
    return {};
}

std::string check_n_cap(std::uint64_t seed) {
    const auto d = draw(seed);
    const auto sel = memory::select_memory_frames(d.leaf, d.n, d.delta_iou);
    if (static_cast<int>(sel.size()) > d.n + 1) return "more than N non-prompt frames" + where(seed);
    return {};
}

std::string check_backward_scan(std::uint64_t seed) {
    const auto d = draw(seed);
    const auto sel = memory::select_memory_frames(d.leaf, d.n, d.delta_iou);
    // Reference: newest-first walk keeping the first N gate-passing records.
    std::vector<int> expected;
    for (const PathwayNode* n = d.leaf.get(); n && !n->is_root(); n = n->parent().get()) {
        const auto& r = n->record();
        if (static_cast<int>(expected.size()) == d.n) break;
        if (r.predicted_iou > d.delta_iou && r.occlusion_score > 0.0) expected.push_back(r.frame_index);
    }
    expected.push_back(0);
    std::sort(expected.begin(), expected.end());
    std::vector<int> got;
    for (const auto& node : sel) got.push_back(node->record().frame_index);
    if (got != expected) return "selected frames differ from the newest-first scan" + where(seed);
    return {};
}

std::string check_weight_range(std::uint64_t seed) {
    const auto scores = random_scores(seed);
    CounterRng rng({seed, 0x77ULL});
    const double lo = rng.uniform(0.5, 1.0);
    const double hi = lo + rng.uniform(0.0, 0.5);
    const auto w = memory::compute_modulation_weights(scores, lo, hi);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < lo || w[i] > hi) return "weight outside bounds" + where(seed);
    }
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (w[order[i]] < w[order[i - 1]]) return "weights decrease with occlusion score" + where(seed);
    }
    return {};
}

std::string check_rank_assignment(std::uint64_t seed) {
    const auto scores = random_scores(seed);
    const auto w = memory::compute_modulation_weights(scores, 0.95, 1.05);
    const auto m = scores.size();
    // Rank r of M (stable ascending) gets w_low + r * (w_high - w_low) / (M - 1).
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t rank = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (scores[j] < scores[i] || (scores[j] == scores[i] && j < i)) ++rank;
        }
        const double expected =
            m == 1 ? 1.0 : 0.95 + static_cast<double>(rank) * (1.05 - 0.95) / static_cast<double>(m - 1);
        if (std::abs(w[i] - expected) > 1e-12) return "weight does not follow rank" + where(seed);
    }
    return {};
}

std::string check_scale_invariance(std::uint64_t seed) {
    const auto scores = random_scores(seed);
    CounterRng rng({seed, 0x73ULL});
    const double k = rng.uniform(0.01, 100.0);
    auto scaled = scores;
    for (auto& v : scaled) v *= k;
    if (memory::compute_modulation_weights(scores, 0.9, 1.1) != memory::compute_modulation_weights(scaled, 0.9, 1.1)) {
        return "positive scaling changed the weights" + where(seed);
    }
    return {};
}

std::string check_unit_bounds_noop(std::uint64_t seed) {
    for (double w : memory::compute_modulation_weights(random_scores(seed), 1.0, 1.0)) {
        if (w != 1.0) return "[1,1] bounds produced a weight other than 1" + where(seed);
    }
    return {};
}

}  // namespace treemem::testkit
