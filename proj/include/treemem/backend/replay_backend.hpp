#pragma once

#include "treemem/backend/decoder_backend.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <tuple>

namespace treemem::backend {

// Replay traces are NDJSON, one decode per line:
//   {"digest":"<request digest>","object_id":..,"time":..,"width":..,"height":..,
//    "response":{"type":"candidates",...},"check":"<digest of response>"}
// plus one line per encoded prompt:
//   {"prompt":"<prompt digest>","object_id":..,"payload_b64":"..","check":".."}
// Lines are written sorted by (object_id, time, digest) so recordings are
// byte-stable regardless of decode order.

/// Wraps another backend and remembers every (request digest, response).
class RecordingBackend final : public DecoderBackend {
public:
    explicit RecordingBackend(DecoderBackend& inner) : inner_(inner) {}

    DecodeResponse decode(const DecodeRequest& request) override;
    bool supports_concurrent_decode() const override { return inner_.supports_concurrent_decode(); }
    Bytes encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) override;

    std::size_t size() const;
    /// Writes the trace atomically (temp file + rename). Throws BackendError(io).
    void save(const std::filesystem::path& path) const;
    /// The trace body as NDJSON text.
    std::string to_ndjson() const;

    /// Writes the union of several recorders' lines as one sorted trace.
    /// Throws BackendError(io).
    static void save_all(std::span<const RecordingBackend* const> recorders,
                         const std::filesystem::path& path);

private:
    DecoderBackend& inner_;
    mutable std::mutex mu_;
    std::map<std::tuple<int, int, std::string>, std::string> lines_;
};

/// Serves responses from a recorded trace. A request whose digest is not in
/// the trace is a hard error; there is no fallthrough to a live decoder.
class ReplayBackend final : public DecoderBackend {
public:
    /// Throws BackendError(digest_mismatch) when a line's response does not
    /// match its integrity check, BackendError(io) when unreadable, and
    /// BackendError(schema_violation) on malformed lines.
    static ReplayBackend load(const std::filesystem::path& path);
    static ReplayBackend parse(std::string_view ndjson);

    DecodeResponse decode(const DecodeRequest& request) override;
    bool supports_concurrent_decode() const override { return true; }
    /// Recorded prompt payload; replay_miss when the prompt was never recorded.
    Bytes encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) override;

    std::size_t size() const { return responses_.size(); }

private:
    std::map<std::string, DecodeResponse> responses_;
    std::map<std::string, Bytes> prompts_;
};

}  // namespace treemem::backend
