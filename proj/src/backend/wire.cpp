#include "treemem/backend/wire.hpp"

#include "treemem/core/errors.hpp"
#include "treemem/core/serialize.hpp"

#include <cmath>

namespace treemem::backend::wire {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& what) {
    throw BackendError(BackendError::Kind::schema_violation,
                       "protocol schema violation at '" + field + "': " + what, field);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) schema(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number()) schema(path.empty() ? key : path + "." + key, "expected a number");
    return v.get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer()) schema(path.empty() ? key : path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) schema(path.empty() ? key : path + "." + key, "expected a string");
    return v.get<std::string>();
}

void require_type(const json& message, std::string_view expected) {
    const auto type = require_string(message, "type", "");
    if (type == "error" && expected != "error") {
        const auto it = message.find("message");
        throw BackendError(BackendError::Kind::decode_failed,
                           "adapter reported error: " +
                               (it != message.end() && it->is_string() ? it->get<std::string>()
                                                                       : std::string("?")));
    }
    if (type != expected) schema("type", "expected '" + std::string(expected) + "', got '" + type + "'");
}

Mask decode_mask(const std::string& rle, int width, int height, const std::string& field) {
    try {
        return decode_rle(rle, width, height);
    } catch (const Error& e) {
        schema(field, e.what());
    }
}

Bytes decode_payload(const std::string& b64, const std::string& field) {
    try {
        return base64_decode(b64);
    } catch (const Error& e) {
        schema(field, e.what());
    }
}

}  // namespace

json hello_message(int version) { return json{{"type", "hello"}, {"version", version}}; }

json hello_reply(bool concurrent, int version) {
    return json{{"type", "hello"}, {"version", version}, {"concurrent", concurrent}};
}

json bye_message() { return json{{"type", "bye"}}; }

json error_message(const std::string& message) {
    return json{{"type", "error"}, {"message", message}};
}

json decode_message(const DecodeRequest& request) {
    if (request.bank.entries.empty()) throw DomainError("decode request with an empty bank");
    const auto& shape = request.bank.entries.front().record().mask;
    json bank = json::array();
    for (const auto& e : request.bank.entries) {
        const auto& r = e.record();
        bank.push_back(json{
            {"frame_index", r.frame_index},
            {"weight", e.weight},
            {"iou", r.predicted_iou},
            {"occ", r.occlusion_score},
            {"mask_rle", encode_rle(r.mask)},
            {"payload_b64", base64_encode(r.payload)},
            {"is_prompt", r.is_prompt},
        });
    }
    return json{
        {"type", "decode"},
        {"object_id", request.object_id},
        {"time", request.time},
        {"frame", request.frame_ref},
        {"width", shape.width()},
        {"height", shape.height()},
        {"bank", std::move(bank)},
    };
}

json candidates_message(const DecodeResponse& response) {
    json items = json::array();
    for (const auto& c : response.candidates) {
        items.push_back(json{
            {"iou", c.predicted_iou},
            {"mask_rle", encode_rle(c.mask)},
            {"payload_b64", base64_encode(c.payload)},
        });
    }
    return json{{"type", "candidates"}, {"occ", response.occlusion_score()}, {"items", std::move(items)}};
}

DecodeMessage parse_decode_message(const json& message) {
    require_type(message, "decode");
    DecodeMessage out;
    out.object_id = require_int(message, "object_id", "");
    out.time = require_int(message, "time", "");
    out.frame = require_string(message, "frame", "");
    out.width = require_int(message, "width", "");
    out.height = require_int(message, "height", "");
    if (out.width < 1) schema("width", "must be >= 1");
    if (out.height < 1) schema("height", "must be >= 1");
    const auto& bank = require(message, "bank", "");
    if (!bank.is_array() || bank.empty()) schema("bank", "expected a non-empty array");
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto path = "bank[" + std::to_string(i) + "]";
        const auto& e = bank[i];
        FrameRecord r;
        r.frame_index = require_int(e, "frame_index", path);
        r.predicted_iou = require_number(e, "iou", path);
        r.occlusion_score = require_number(e, "occ", path);
        r.mask = decode_mask(require_string(e, "mask_rle", path), out.width, out.height,
                             path + ".mask_rle");
        r.payload = decode_payload(require_string(e, "payload_b64", path), path + ".payload_b64");
        const auto& prompt = require(e, "is_prompt", path);
        if (!prompt.is_boolean()) schema(path + ".is_prompt", "expected a boolean");
        r.is_prompt = prompt.get<bool>();
        const double weight = require_number(e, "weight", path);
        out.bank.emplace_back(std::move(r), weight);
    }
    return out;
}

DecodeResponse parse_candidates(const json& message, int width, int height) {
    require_type(message, "candidates");
    const double occ = require_number(message, "occ", "");
    if (!std::isfinite(occ)) schema("occ", "must be finite");
    const auto& items = require(message, "items", "");
    if (!items.is_array()) schema("items", "expected an array");
    if (items.size() != 3) {
        schema("items", "expected exactly 3 candidates, got " + std::to_string(items.size()));
    }
    DecodeResponse out;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto path = "items[" + std::to_string(k) + "]";
        auto& c = out.candidates[k];
        c.predicted_iou = require_number(items[k], "iou", path);
        if (!(c.predicted_iou >= 0.0 && c.predicted_iou <= 1.0)) {
            schema(path + ".iou", "outside [0,1]");
        }
        c.occlusion_score = occ;
        c.mask = decode_mask(require_string(items[k], "mask_rle", path), width, height,
                             path + ".mask_rle");
        c.payload = decode_payload(require_string(items[k], "payload_b64", path),
                                   path + ".payload_b64");
    }
    return out;
}

HelloReply parse_hello_reply(const json& message) {
    require_type(message, "hello");
    HelloReply r;
    r.version = require_int(message, "version", "");
    const auto it = message.find("concurrent");
    if (it != message.end()) {
        if (!it->is_boolean()) schema("concurrent", "expected a boolean");
        r.concurrent = it->get<bool>();
    }
    return r;
}

json parse_line(std::string_view line) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw BackendError(BackendError::Kind::schema_violation,
                           std::string("malformed NDJSON line: ") + e.what(), "line");
    }
}

}  // namespace treemem::backend::wire
