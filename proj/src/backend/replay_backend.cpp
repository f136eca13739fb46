#include "treemem/backend/replay_backend.hpp"

#include "treemem/backend/wire.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/core/serialize.hpp"

#include <fstream>
#include <sstream>

namespace treemem::backend {

using nlohmann::json;

namespace {

std::string response_check(const json& response) { return Fnv1a64().update(response.dump()).hex(); }

std::string prompt_digest(int object_id, const std::string& frame_ref, const Mask& mask) {
    return Fnv1a64()
        .update(std::int64_t{object_id})
        .update(frame_ref)
        .update(std::string_view("|"))
        .update(encode_rle(mask))
        .hex();
}

}  // namespace

DecodeResponse RecordingBackend::decode(const DecodeRequest& request) {
    auto response = inner_.decode(request);
    const auto digest = request_digest(request);
    const auto& shape = request.bank.entries.front().record().mask;
    auto body = wire::candidates_message(response);
    json line{
        {"digest", digest},
        {"object_id", request.object_id},
        {"time", request.time},
        {"width", shape.width()},
        {"height", shape.height()},
        {"check", response_check(body)},
        {"response", std::move(body)},
    };
    std::lock_guard lock(mu_);
    lines_.emplace(std::make_tuple(request.object_id, request.time, digest), line.dump());
    return response;
}

Bytes RecordingBackend::encode_prompt(int object_id, const std::string& frame_ref,
                                      const Mask& mask) {
    auto payload = inner_.encode_prompt(object_id, frame_ref, mask);
    const auto digest = prompt_digest(object_id, frame_ref, mask);
    const auto b64 = base64_encode(payload);
    json line{
        {"prompt", digest},
        {"object_id", object_id},
        {"payload_b64", b64},
        {"check", Fnv1a64().update(b64).hex()},
    };
    std::lock_guard lock(mu_);
    lines_.emplace(std::make_tuple(object_id, -1, digest), line.dump());
    return payload;
}

std::size_t RecordingBackend::size() const {
    std::lock_guard lock(mu_);
    return lines_.size();
}

std::string RecordingBackend::to_ndjson() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& [_, line] : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

namespace {

void write_atomically(const std::string& body, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw BackendError(BackendError::Kind::io, "cannot write " + tmp.string());
        out << body;
        if (!out) throw BackendError(BackendError::Kind::io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw BackendError(BackendError::Kind::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

void RecordingBackend::save(const std::filesystem::path& path) const { write_atomically(to_ndjson(), path); }

void RecordingBackend::save_all(std::span<const RecordingBackend* const> recorders,
                                const std::filesystem::path& path) {
    std::map<std::tuple<int, int, std::string>, std::string> merged;
    for (const auto* r : recorders) {
        std::lock_guard lock(r->mu_);
        merged.insert(r->lines_.begin(), r->lines_.end());
    }
    std::string body;
    for (const auto& [_, line] : merged) {
        body += line;
        body += '\n';
    }
    write_atomically(body, path);
}

ReplayBackend ReplayBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendError(BackendError::Kind::io, "cannot open replay trace " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ReplayBackend ReplayBackend::parse(std::string_view ndjson) {
    ReplayBackend out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < ndjson.size()) {
        auto end = ndjson.find('\n', pos);
        if (end == std::string_view::npos) end = ndjson.size();
        const auto text = ndjson.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const auto line = wire::parse_line(text);
        const auto where = "replay line " + std::to_string(line_no);
        try {
        if (line.is_object() && line.contains("prompt")) {
            if (!line.contains("payload_b64") || !line.contains("check")) {
                throw BackendError(BackendError::Kind::schema_violation, where + ": missing fields", "line");
            }
            const auto b64 = line.at("payload_b64").get<std::string>();
            if (Fnv1a64().update(b64).hex() != line.at("check").get<std::string>()) {
                throw BackendError(BackendError::Kind::digest_mismatch,
                                   where + ": prompt payload does not match its recorded digest");
            }
            Bytes payload;
            try {
                payload = base64_decode(b64);
            } catch (const ParseError& e) {
                throw BackendError(BackendError::Kind::schema_violation, where + ": " + e.what(),
                                   "payload_b64");
            }
            out.prompts_[line.at("prompt").get<std::string>()] = std::move(payload);
            continue;
        }
        if (!line.is_object() || !line.contains("digest") || !line.contains("response") ||
            !line.contains("check") || !line.contains("width") || !line.contains("height")) {
            throw BackendError(BackendError::Kind::schema_violation, where + ": missing fields", "line");
        }
        const auto& response = line.at("response");
        if (response_check(response) != line.at("check").get<std::string>()) {
            throw BackendError(BackendError::Kind::digest_mismatch,
                               where + ": response does not match its recorded digest");
        }
        auto decoded = wire::parse_candidates(response, line.at("width").get<int>(),
                                              line.at("height").get<int>());
        const auto digest = line.at("digest").get<std::string>();
        const auto [it, inserted] = out.responses_.emplace(digest, decoded);
        if (!inserted && !(it->second.candidates == decoded.candidates)) {
            throw BackendError(BackendError::Kind::digest_mismatch,
                               where + ": conflicting responses for request digest " + digest);
        }
        } catch (const json::exception& e) {
            throw BackendError(BackendError::Kind::schema_violation, where + ": " + e.what(), "line");
        }
    }
    return out;
}

Bytes ReplayBackend::encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) {
    const auto it = prompts_.find(prompt_digest(object_id, frame_ref, mask));
    if (it == prompts_.end()) {
        throw BackendError(BackendError::Kind::replay_miss,
                           "replay trace has no prompt for object " + std::to_string(object_id) +
                               " at frame " + frame_ref);
    }
    return it->second;
}

DecodeResponse ReplayBackend::decode(const DecodeRequest& request) {
    const auto digest = request_digest(request);
    const auto it = responses_.find(digest);
    if (it == responses_.end()) {
        throw BackendError(BackendError::Kind::replay_miss,
                           "replay trace has no response for object " +
                               std::to_string(request.object_id) + " at time " +
                               std::to_string(request.time) + " (digest " + digest + ")");
    }
    return it->second;
}

}  // namespace treemem::backend
