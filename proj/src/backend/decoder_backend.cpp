#include "treemem/backend/decoder_backend.hpp"

#include "treemem/core/errors.hpp"
#include "treemem/core/serialize.hpp"

#include <cmath>

namespace treemem::backend {

void validate_response(const DecodeResponse& response, int width, int height) {
    const double occ = response.candidates[0].occlusion_score;
    if (!std::isfinite(occ)) throw DomainError("decoder returned a non-finite occlusion score");
    for (std::size_t k = 0; k < response.candidates.size(); ++k) {
        const auto& c = response.candidates[k];
        const auto where = "candidate " + std::to_string(k);
        if (!(c.predicted_iou >= 0.0 && c.predicted_iou <= 1.0)) {
            throw DomainError(where + ": predicted_iou " + format_double(c.predicted_iou) +
                              " outside [0,1]");
        }
        if (c.occlusion_score != occ) {
            throw DomainError(where + ": occlusion score differs from candidate 0");
        }
        if (c.mask.width() != width || c.mask.height() != height) {
            throw DomainError(where + ": mask is " + std::to_string(c.mask.width()) + "x" +
                              std::to_string(c.mask.height()) + ", expected " +
                              std::to_string(width) + "x" + std::to_string(height));
        }
    }
}

std::string frame_ref_for(int time) { return std::to_string(time); }

std::string request_digest(const DecodeRequest& request) {
    Fnv1a64 h;
    h.update(std::int64_t{request.object_id});
    h.update(std::int64_t{request.time});
    h.update(static_cast<std::int64_t>(request.bank.entries.size()));
    for (const auto& e : request.bank.entries) {
        h.update(std::int64_t{e.record().frame_index});
        h.update(static_cast<std::int64_t>(std::llround(e.weight * 1e4)));
        h.update(encode_rle(e.record().mask));
        h.update(std::string_view("|"));
        h.update(static_cast<std::int64_t>(e.record().payload.size()));
        h.update(e.record().payload);
    }
    return h.hex();
}

Bytes DecoderBackend::encode_prompt(int, const std::string&, const Mask&) { return {}; }

}  // namespace treemem::backend
