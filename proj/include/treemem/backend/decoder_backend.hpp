#pragma once

#include "treemem/core/types.hpp"
#include "treemem/memory/memory_bank.hpp"

#include <array>
#include <string>

namespace treemem::backend {

/// Everything a decoder needs for one (object, frame) decode: the frame is
/// referenced by identifier, the memory bank carries records and weights.
struct DecodeRequest {
    int object_id = 0;
    int time = 0;
    std::string frame_ref;
    memory::MemoryBankView bank;
};

/// Exactly three candidates sharing one occlusion score.
struct DecodeResponse {
    std::array<CandidatePrediction, 3> candidates;

    double occlusion_score() const { return candidates[0].occlusion_score; }
};

/// Throws DomainError when a response breaks its contract: IoU outside
/// [0,1], non-finite or unshared occlusion score, or masks whose dimensions
/// differ from `width` x `height`.
void validate_response(const DecodeResponse& response, int width, int height);

/// Default textual frame identifier for a frame index.
std::string frame_ref_for(int time);

/// Digest of a request: object id, time, and each bank entry's frame index,
/// weight quantized to 1e-4, mask RLE, and payload bytes. Stable across
/// platforms.
std::string request_digest(const DecodeRequest& request);

/// The decoder seam. Implementations must be deterministic given their
/// construction parameters and the request.
class DecoderBackend {
public:
    virtual ~DecoderBackend() = default;

    virtual DecodeResponse decode(const DecodeRequest& request) = 0;

    /// Whether decode() may be called from several threads at once.
    virtual bool supports_concurrent_decode() const = 0;

    /// Memory features for the prompt record. Backends without private
    /// prompt features return an empty payload.
    virtual Bytes encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask);
};

}  // namespace treemem::backend
