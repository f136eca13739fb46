#pragma once

#include "treemem/backend/decoder_backend.hpp"
#include "treemem/core/hyperparams.hpp"
#include "treemem/core/types.hpp"
#include "treemem/memory/memory_bank.hpp"

#include <cstdint>

namespace treemem::search {

struct BruteForceResult {
    NodePtr best;
    std::uint64_t pathways = 0;  ///< complete pathways enumerated
};

/// Largest number of pathways brute_force_best will enumerate (3^10).
inline constexpr std::uint64_t kBruteForceCap = 59049;

/// Enumerates all 3^T candidate sequences for frames prompt+1 .. last_frame,
/// rebuilding each sequence's own memory bank, and returns the one with the
/// highest cumulative score. Ties resolve exactly as the beam's total order
/// would with P = 3^T. Throws ConfigError when 3^T exceeds `cap`.
BruteForceResult brute_force_best(int object_id, FrameRecord prompt, int last_frame,
                                  backend::DecoderBackend& decoder, const Hyperparams& h,
                                  std::uint64_t cap = kBruteForceCap);

/// True when pathway `a` ranks before pathway `b` (same length) under the
/// beam's total order unrolled over every level.
bool pathway_ranks_before(const NodePtr& a, const NodePtr& b);

}  // namespace treemem::search
