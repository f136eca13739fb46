#pragma once

// Helpers shared by the unit and acceptance tests.

#include "treemem/backend/decoder_backend.hpp"
#include "treemem/core/types.hpp"
#include "treemem/search/beam_search.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace treemem::testkit {

/// Mask with the inclusive box [x0,x1] x [y0,y1] set.
Mask box(int width, int height, int x0, int y0, int x1, int y1);

/// Response with the given IoUs, one shared occlusion score, and a distinct
/// 4x4 mask per candidate.
backend::DecodeResponse response(std::array<double, 3> ious, double occ, int width = 4, int height = 4);

/// Candidate hanging off a fresh prompt root, decoded on frame 1.
search::ExpansionCandidate candidate(double score, double iou, double occ = 3.0, int parent_position = 0,
                                     int candidate_index = 0);

/// Chain built from (iou, occ) records on frames 1, 2, ... under a 4x4
/// prompt at frame 0. Scores follow the score update with epsilon 1e-10.
NodePtr chain(const std::vector<std::pair<double, double>>& records);

/// Strict greedy tracking written directly against the decoder: memory is
/// the prompt plus the `memory_frames` most recent records, every weight is
/// 1, and each frame commits the highest-IoU candidate (lowest index on
/// ties). Returns the committed records, prompt first.
struct FifoTrack {
    std::vector<FrameRecord> records;
    std::vector<double> scores;
};
FifoTrack fifo_reference(int object_id, FrameRecord prompt, int last_frame, backend::DecoderBackend& decoder,
                         int memory_frames, double epsilon = 1e-10);

/// Random pathway for memory properties: length, IoUs and occlusion scores
/// drawn from `seed`.
NodePtr random_chain(std::uint64_t seed, int max_length = 14);

/// Memory-gate and modulation properties over one seeded chain. Each returns
/// an empty string on success, else a description of the violation.
std::string check_gate_soundness(std::uint64_t seed);
std::string check_prompt_inclusion(std::uint64_t seed);
std::string check_n_cap(std::uint64_t seed);
std::string check_backward_scan(std::uint64_t seed);
std::string check_weight_range(std::uint64_t seed);
std::string check_rank_assignment(std::uint64_t seed);
std::string check_scale_invariance(std::uint64_t seed);
std::string check_unit_bounds_noop(std::uint64_t seed);

}  // namespace treemem::testkit
