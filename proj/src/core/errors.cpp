#include "treemem/core/errors.hpp"

namespace treemem {

BackendError::BackendError(Kind kind, const std::string& message, std::string field)
    : Error(message), kind_(kind), field_(std::move(field)) {}

std::string_view to_string(BackendError::Kind kind) {
    switch (kind) {
        case BackendError::Kind::decode_failed: return "decode_failed";
        case BackendError::Kind::timeout: return "timeout";
        case BackendError::Kind::process_exit: return "process_exit";
        case BackendError::Kind::version_mismatch: return "version_mismatch";
        case BackendError::Kind::schema_violation: return "schema_violation";
        case BackendError::Kind::replay_miss: return "replay_miss";
        case BackendError::Kind::digest_mismatch: return "digest_mismatch";
        case BackendError::Kind::io: return "io";
    }
    return "unknown";
}

}  // namespace treemem
