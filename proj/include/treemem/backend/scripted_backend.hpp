#pragma once

#include "treemem/backend/decoder_backend.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <utility>

namespace treemem::backend {

/// Table-driven decoder: the response for (object, time) is fixed and does
/// not depend on the memory bank.
class TableBackend final : public DecoderBackend {
public:
    TableBackend(int width, int height) : width_(width), height_(height) {}

    void set(int object_id, int time, DecodeResponse response);

    /// Fixture file: {"width":W,"height":H,"frames":[{"object_id":0,"time":1,
    /// "occ":..,"items":[{"iou":..,"mask_rle":"..","payload_b64":".."} x3]}]}.
    /// "object_id" defaults to 0.
    static TableBackend from_json(const nlohmann::json& fixture);
    static TableBackend load(const std::filesystem::path& path);

    /// Throws BackendError(decode_failed) when the table has no entry.
    DecodeResponse decode(const DecodeRequest& request) override;
    bool supports_concurrent_decode() const override { return true; }

    int width() const { return width_; }
    int height() const { return height_; }

private:
    int width_;
    int height_;
    std::map<std::pair<int, int>, DecodeResponse> table_;
};

/// Seeded pseudo-random decoder used for oracle and property fixtures.
/// Every response is a pure function of the seed and the request, so runs
/// are reproducible and concurrent decodes are safe.
struct RandomScriptOptions {
    std::uint64_t seed = 0;
    int width = 6;
    int height = 6;
    /// IoUs are quantized to this many decimals (ties become likely);
    /// negative keeps full precision.
    int iou_decimals = 2;
    /// When false, IoUs depend only on (seed, object, time, candidate); the
    /// masks and occlusion scores still follow the bank.
    bool path_dependent_iou = true;
    /// Occlusion scores are drawn with magnitude in [occ_min_abs, occ_max_abs]
    /// and quantized to 0.1.
    double occ_min_abs = 0.0;
    double occ_max_abs = 4.0;
};

class RandomScriptBackend final : public DecoderBackend {
public:
    explicit RandomScriptBackend(RandomScriptOptions options) : opt_(options) {}

    DecodeResponse decode(const DecodeRequest& request) override;
    bool supports_concurrent_decode() const override { return true; }

    const RandomScriptOptions& options() const { return opt_; }

    /// A deterministic prompt mask for the fixture's canvas.
    Mask prompt_mask(int object_id) const;

private:
    RandomScriptOptions opt_;
};

}  // namespace treemem::backend
