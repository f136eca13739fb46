#include "treemem/backend/scripted_backend.hpp"

#include "treemem/backend/wire.hpp"
#include "treemem/core/counter_rng.hpp"
#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace treemem::backend {

void TableBackend::set(int object_id, int time, DecodeResponse response) {
    validate_response(response, width_, height_);
    table_[{object_id, time}] = std::move(response);
}

TableBackend TableBackend::from_json(const nlohmann::json& fixture) {
    try {
        TableBackend t(fixture.at("width").get<int>(), fixture.at("height").get<int>());
        for (const auto& f : fixture.at("frames")) {
            const int object_id = f.value("object_id", 0);
            const int time = f.at("time").get<int>();
            auto message = f;
            message["type"] = "candidates";
            t.set(object_id, time, wire::parse_candidates(message, t.width_, t.height_));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed scripted fixture: ") + e.what());
    }
}

TableBackend TableBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scripted fixture " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed scripted fixture " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

DecodeResponse TableBackend::decode(const DecodeRequest& request) {
    const auto it = table_.find({request.object_id, request.time});
    if (it == table_.end()) {
        throw BackendError(BackendError::Kind::decode_failed,
                           "scripted table has no entry for object " +
                               std::to_string(request.object_id) + " at time " +
                               std::to_string(request.time));
    }
    return it->second;
}

namespace {

double quantize(double v, int decimals) {
    if (decimals < 0) return v;
    const double scale = std::pow(10.0, decimals);
    return std::nearbyint(v * scale) / scale;
}

std::uint64_t digest_value(const DecodeRequest& request) {
    return std::stoull(request_digest(request), nullptr, 16);
}

}  // namespace

DecodeResponse RandomScriptBackend::decode(const DecodeRequest& request) {
    const auto bank_key = digest_value(request);
    const auto oid = static_cast<std::uint64_t>(request.object_id);
    const auto t = static_cast<std::uint64_t>(request.time);

    CounterRng path({opt_.seed, oid, t, bank_key});

    DecodeResponse out;
    double magnitude = path.uniform(opt_.occ_min_abs, opt_.occ_max_abs);
    magnitude = std::max(opt_.occ_min_abs, quantize(magnitude, 1));
    const double occ = path.bernoulli(0.5) ? magnitude : -magnitude;

    for (int k = 0; k < 3; ++k) {
        auto& c = out.candidates[k];
        CounterRng iou_rng = opt_.path_dependent_iou
                                 ? CounterRng({opt_.seed, oid, t, bank_key, 0x10u + k})
                                 : CounterRng({opt_.seed, oid, t, 0x10u + k});
        c.predicted_iou = std::clamp(quantize(iou_rng.uniform(), opt_.iou_decimals), 0.0, 1.0);
        c.occlusion_score = occ;

        CounterRng mask_rng({opt_.seed, oid, t, bank_key, 0x20u + k});
        c.mask = Mask(opt_.width, opt_.height);
        const double density = mask_rng.uniform(0.1, 0.6);
        for (int y = 0; y < opt_.height; ++y) {
            for (int x = 0; x < opt_.width; ++x) c.mask.set(x, y, mask_rng.bernoulli(density));
        }
        const auto tag = mask_rng.next_u64();
        for (int b = 0; b < 8; ++b) c.payload.push_back(static_cast<std::uint8_t>(tag >> (8 * b)));
    }
    return out;
}

Mask RandomScriptBackend::prompt_mask(int object_id) const {
    CounterRng rng({opt_.seed, static_cast<std::uint64_t>(object_id), 0x9909});
    Mask m(opt_.width, opt_.height);
    for (int y = 0; y < opt_.height; ++y) {
        for (int x = 0; x < opt_.width; ++x) m.set(x, y, rng.bernoulli(0.4));
    }
    return m;
}

}  // namespace treemem::backend
