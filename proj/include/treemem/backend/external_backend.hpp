#pragma once

#include "treemem/backend/decoder_backend.hpp"

#include <chrono>
#include <mutex>
#include <string>
#include <sys/types.h>

namespace treemem::backend {

struct ExternalOptions {
    /// Shell command line launching the adapter (run via /bin/sh -c).
    std::string command;
    std::chrono::milliseconds timeout{30'000};
    int protocol_version = 1;
};

/// Decoder living in a child process, spoken to with NDJSON protocol v1 over
/// its stdio (see wire.hpp). Requests are serialized: one in flight per child.
///
/// Failure kinds surface as BackendError: timeout (no reply in time),
/// process_exit (child closed its output or died), version_mismatch (at
/// handshake), schema_violation (malformed reply), decode_failed (adapter
/// replied with an error message).
class ExternalBackend final : public DecoderBackend {
public:
    /// Launches the child and performs the handshake.
    explicit ExternalBackend(ExternalOptions options);
    ~ExternalBackend() override;

    ExternalBackend(const ExternalBackend&) = delete;
    ExternalBackend& operator=(const ExternalBackend&) = delete;

    DecodeResponse decode(const DecodeRequest& request) override;
    /// Always false: the child handles one request at a time.
    bool supports_concurrent_decode() const override { return false; }

    /// What the adapter declared at handshake.
    bool adapter_concurrent() const { return adapter_concurrent_; }

    /// Sends bye and reaps the child; idempotent. Returns the exit status
    /// (as from waitpid) or -1 if the child had to be killed.
    int shutdown();

private:
    void send_line(const std::string& line);
    std::string read_line();

    ExternalOptions opt_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
    bool adapter_concurrent_ = false;
    bool closed_ = false;
    int exit_status_ = 0;
    std::mutex mu_;
};

}  // namespace treemem::backend
