#include "jsonrpc.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "error.hpp"

namespace toolmem {

namespace {

void ignore_sigpipe() {
    static const bool done = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

}  // namespace

LineTransport::LineTransport(int read_fd, int write_fd, bool own_fds, pid_t child_pid)
    : read_fd_(read_fd), write_fd_(write_fd), own_fds_(own_fds), child_pid_(child_pid) {
    ignore_sigpipe();
}

LineTransport::~LineTransport() {
    if (own_fds_) {
        if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
        if (read_fd_ >= 0) ::close(read_fd_);
    }
    if (child_pid_ > 0) {
        int status = 0;
        ::waitpid(child_pid_, &status, 0);
    }
}

bool LineTransport::read_line(std::string& line) {
    for (;;) {
        auto newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            line.assign(buffer_, 0, newline);
            buffer_.erase(0, newline + 1);
            return true;
        }
        char chunk[65536];
        ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        if (n == 0) return false;  // EOF; an unterminated tail is dropped
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void LineTransport::write_line(const std::string& line) {
    std::lock_guard lock(write_mutex_);
    std::string framed = line;
    framed.push_back('\n');
    const char* data = framed.data();
    std::size_t remaining = framed.size();
    while (remaining > 0) {
        ssize_t n = ::write(write_fd_, data, remaining);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::transport,
                        std::string("write failed: ") + std::strerror(errno));
        }
        data += n;
        remaining -= static_cast<std::size_t>(n);
    }
}

void LineTransport::close_write() {
    std::lock_guard lock(write_mutex_);
    if (own_fds_ && write_fd_ >= 0 && write_fd_ != read_fd_) {
        ::close(write_fd_);
        write_fd_ = -1;
    }
}

std::unique_ptr<LineTransport> spawn_subprocess(const std::string& command) {
    ignore_sigpipe();
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
        throw Error(ErrorCode::transport, "pipe creation failed");

    pid_t pid = ::fork();
    if (pid < 0) throw Error(ErrorCode::transport, "fork failed");

    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::close(to_child[0]);
        ::close(to_child[1]);
        ::close(from_child[0]);
        ::close(from_child[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
        ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::make_unique<LineTransport>(from_child[0], to_child[1], true, pid);
}

std::unique_ptr<LineTransport> connect_tcp(const std::string& host, int port) {
    ignore_sigpipe();
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error(ErrorCode::transport, "socket creation failed");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        hostent* ent = ::gethostbyname(host.c_str());
        if (!ent || ent->h_addrtype != AF_INET) {
            ::close(fd);
            throw Error(ErrorCode::transport, "cannot resolve host '" + host + "'");
        }
        std::memcpy(&addr.sin_addr, ent->h_addr_list[0], sizeof(addr.sin_addr));
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw Error(ErrorCode::transport, "cannot connect to " + host + ":" +
                                              std::to_string(port) + ": " +
                                              std::strerror(errno));
    }
    return std::make_unique<LineTransport>(fd, fd, true);
}

TcpListener::TcpListener(int port) {
    ignore_sigpipe();
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error(ErrorCode::transport, "socket creation failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd_, 16) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Error(ErrorCode::transport,
                    "cannot listen on port " + std::to_string(port));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<LineTransport> TcpListener::accept() {
    int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0)
        throw Error(ErrorCode::transport,
                    std::string("accept failed: ") + std::strerror(errno));
    return std::make_unique<LineTransport>(client, client, true);
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

namespace jsonrpc {

Value make_request(std::int64_t id, const std::string& method, Value params) {
    return Value{{"jsonrpc", "2.0"}, {"id", id}, {"method", method},
                 {"params", std::move(params)}};
}

Value make_notification(const std::string& method, Value params) {
    return Value{{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}};
}

Value make_result(const Value& id, Value result) {
    return Value{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

Value make_error(const Value& id, int code, const std::string& message) {
    return Value{{"jsonrpc", "2.0"},
                 {"id", id},
                 {"error", Value{{"code", code}, {"message", message}}}};
}

std::optional<Value> parse_frame(const std::string& line) {
    Value frame = Value::parse(line, nullptr, false);
    if (frame.is_discarded() || !frame.is_object()) return std::nullopt;
    return frame;
}

}  // namespace jsonrpc

}  // namespace toolmem
