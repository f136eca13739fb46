#pragma once

#include "treemem/backend/decoder_backend.hpp"
#include "treemem/simworld/render.hpp"
#include "treemem/simworld/scenario.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace treemem::simworld {

/// What the simulator knows about a committed mask, carried as the record's
/// payload so later decodes need not re-rasterize it.
struct MaskFacts {
    std::uint64_t id = 0;          ///< pathway-dependent identity
    double target_iou = 0.0;       ///< IoU with the tracked object's ground truth
    double distractor_iou = 0.0;   ///< best IoU with a visible other object
    int distractor_id = -1;        ///< that object, or -1

    friend bool operator==(const MaskFacts&, const MaskFacts&) = default;
};

Bytes encode_facts(const MaskFacts& facts);
/// nullopt when the payload is not a facts record.
std::optional<MaskFacts> decode_facts(const Bytes& payload);

/// Weighted share of bank entries agreeing with the tracked object
/// (target_iou >= 0.5) and with the strongest distractor
/// (distractor_iou >= 0.5, summed per distractor).
struct BankConsistency {
    double target_mass = 1.0;
    int distractor_id = -1;
    double distractor_mass = 0.0;
};

/// Synthetic decoder over a scenario.
///
/// For a request on object o at frame t, with bank consistency f (target
/// mass) and d (strongest distractor mass):
///   belief   = that distractor if d >= 0.5, else o; c = its mass
///   (a)      = o's shape with its centre moved toward the nearest visible
///              other object by (1 - f); when o is hidden, the belief's
///              shape if the belief is a visible distractor, else empty
///   (b)      = the nearest visible other object, else (a) dilated by 2 px
///   (c)      = (a) at half size
///   jitter   = each candidate's size is off by +-1 px with probability
///              mask_jitter
///   rating   = IoU(candidate, belief ground truth) * c^consistency_power
///              + calibration noise + bank-dependent noise, clipped to [0,1].
///              While o is hidden and still believed in, empty candidates
///              rate occluded_empty_iou and others rate the nearest
///              object's distractor_similarity times their IoU with it.
///   occlusion = uniform in +-uncertain_band while o is hidden,
///              +occ_margin * c when the belief is visible, -occ_margin
///              otherwise.
/// All randomness is keyed by (seed, object, frame, channel, candidate), so
/// responses depend only on the scenario and the request.
class MockDecoder final : public backend::DecoderBackend {
public:
    explicit MockDecoder(ScenarioSpec spec);

    backend::DecodeResponse decode(const backend::DecodeRequest& request) override;
    bool supports_concurrent_decode() const override { return true; }
    Bytes encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) override;

    const ScenarioSpec& spec() const noexcept { return spec_; }
    const GroundTruthFrame& ground_truth(int t) const;

    /// Facts of `mask` as if committed for `object_id` at frame t.
    MaskFacts facts_for(int object_id, int t, const Mask& mask, std::uint64_t id) const;
    /// The poisoning formula over a bank.
    BankConsistency consistency(int object_id, const memory::MemoryBankView& bank) const;

private:
    ScenarioSpec spec_;
    std::vector<GroundTruthFrame> frames_;
};

/// Prompt record for `object_id` at frame 0: ground-truth mask plus the
/// backend's prompt payload.
FrameRecord prompt_record(backend::DecoderBackend& decoder, const ScenarioSpec& spec, int object_id);

}  // namespace treemem::simworld
