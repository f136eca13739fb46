#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treemem {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violated the mathematical domain of an operation (e.g. IoU outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed text input: RLE strings, JSON documents, scenario files.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (hyperparameters, run configs, CLI flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failures crossing the decoder-backend boundary. Each kind is distinct so
/// callers (and the CLI's error JSON) can tell transport problems apart.
class BackendError : public Error {
public:
    enum class Kind {
        decode_failed,
        timeout,
        process_exit,
        version_mismatch,
        schema_violation,
        replay_miss,
        digest_mismatch,
        io,
    };

    BackendError(Kind kind, const std::string& message, std::string field = {});

    Kind kind() const noexcept { return kind_; }
    /// Offending field for schema violations; empty otherwise.
    const std::string& field() const noexcept { return field_; }

private:
    Kind kind_;
    std::string field_;
};

std::string_view to_string(BackendError::Kind kind);

}  // namespace treemem
