#pragma once

// NDJSON protocol v1 spoken with external decoder adapters over stdio.
//
//   engine -> {"type":"hello","version":1}
//   adapter <- {"type":"hello","version":1,"concurrent":false}
//   engine -> {"type":"decode","object_id":..,"time":..,"frame":"<id>",
//              "width":..,"height":..,
//              "bank":[{"frame_index":..,"weight":..,"iou":..,"occ":..,
//                       "mask_rle":"..","payload_b64":"..","is_prompt":..}, ...]}
//   adapter <- {"type":"candidates","occ":..,
//              "items":[{"iou":..,"mask_rle":"..","payload_b64":".."} x3]}
//   engine -> {"type":"bye"}
//
// An adapter may answer any request with {"type":"error","message":".."}.

#include "treemem/backend/decoder_backend.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace treemem::backend::wire {

inline constexpr int kProtocolVersion = 1;

nlohmann::json hello_message(int version = kProtocolVersion);
nlohmann::json hello_reply(bool concurrent, int version = kProtocolVersion);
nlohmann::json bye_message();
nlohmann::json error_message(const std::string& message);

nlohmann::json decode_message(const DecodeRequest& request);
nlohmann::json candidates_message(const DecodeResponse& response);

/// Adapter-side view of a decode message. Bank records are reconstructed
/// with their weights; pathway structure is not transmitted.
struct DecodeMessage {
    int object_id = 0;
    int time = 0;
    std::string frame;
    int width = 1;
    int height = 1;
    std::vector<std::pair<FrameRecord, double>> bank;
};

/// Each parser throws BackendError(schema_violation) naming the offending
/// field when the message does not match the protocol.
DecodeMessage parse_decode_message(const nlohmann::json& message);
DecodeResponse parse_candidates(const nlohmann::json& message, int width, int height);

struct HelloReply {
    int version = 0;
    bool concurrent = false;
};
HelloReply parse_hello_reply(const nlohmann::json& message);

/// Parses one NDJSON line; malformed JSON is a schema violation.
nlohmann::json parse_line(std::string_view line);

}  // namespace treemem::backend::wire
