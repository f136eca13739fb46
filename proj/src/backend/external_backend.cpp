#include "treemem/backend/external_backend.hpp"

#include "treemem/backend/wire.hpp"
#include "treemem/core/errors.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace treemem::backend {

using Kind = BackendError::Kind;
using Clock = std::chrono::steady_clock;

ExternalBackend::ExternalBackend(ExternalOptions options) : opt_(std::move(options)) {
    if (opt_.command.empty()) throw ConfigError("external backend needs a command");

    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        throw BackendError(Kind::io, std::string("socketpair: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        throw BackendError(Kind::io, std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
        // Child: the socket becomes both stdin and stdout; stderr is inherited.
        // Its own process group lets shutdown reach whatever the shell spawns.
        ::setpgid(0, 0);
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", opt_.command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(sv[1]);
    fd_ = sv[0];

    try {
        send_line(wire::hello_message(opt_.protocol_version).dump());
        const auto reply = wire::parse_hello_reply(wire::parse_line(read_line()));
        if (reply.version != opt_.protocol_version) {
            throw BackendError(Kind::version_mismatch,
                               "adapter speaks protocol version " + std::to_string(reply.version) +
                                   ", engine expects " + std::to_string(opt_.protocol_version),
                               "version");
        }
        adapter_concurrent_ = reply.concurrent;
    } catch (...) {
        shutdown();
        throw;
    }
}

ExternalBackend::~ExternalBackend() { shutdown(); }

void ExternalBackend::send_line(const std::string& line) {
    std::string data = line;
    data += '\n';
    std::size_t off = 0;
    while (off < data.size()) {
        const auto n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw BackendError(Kind::process_exit,
                               std::string("adapter stopped reading: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::string ExternalBackend::read_line() {
    const auto deadline = Clock::now() + opt_.timeout;
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            auto line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) {
            throw BackendError(Kind::timeout, "adapter did not reply within " +
                                                  std::to_string(opt_.timeout.count()) + " ms");
        }
        pollfd p{fd_, POLLIN, 0};
        const int r = ::poll(&p, 1, static_cast<int>(left.count()));
        if (r < 0) {
            if (errno == EINTR) continue;
            throw BackendError(Kind::io, std::string("poll: ") + std::strerror(errno));
        }
        if (r == 0) continue;
        char chunk[4096];
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw BackendError(Kind::process_exit, std::string("adapter read failed: ") + std::strerror(errno));
        }
        if (n == 0) throw BackendError(Kind::process_exit, "adapter exited or closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

DecodeResponse ExternalBackend::decode(const DecodeRequest& request) {
    std::lock_guard lock(mu_);
    if (closed_) throw BackendError(Kind::process_exit, "adapter already shut down");
    if (request.bank.entries.empty()) throw DomainError("decode request with an empty bank");
    const auto& shape = request.bank.entries.front().record().mask;
    send_line(wire::decode_message(request).dump());
    auto response = wire::parse_candidates(wire::parse_line(read_line()), shape.width(), shape.height());
    validate_response(response, shape.width(), shape.height());
    return response;
}

int ExternalBackend::shutdown() {
    std::lock_guard lock(mu_);
    if (closed_) return exit_status_;
    closed_ = true;
    if (fd_ >= 0) {
        try {
            send_line(wire::bye_message().dump());
        } catch (const BackendError&) {
        }
        ::shutdown(fd_, SHUT_WR);
    }
    int status = 0;
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    while (true) {
        const auto r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_) {
            exit_status_ = status;
            break;
        }
        if (r < 0) {
            exit_status_ = -1;
            break;
        }
        if (Clock::now() > deadline) {
            ::kill(-pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            exit_status_ = -1;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    return exit_status_;
}

}  // namespace treemem::backend
