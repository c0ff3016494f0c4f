#pragma once

#include <sys/types.h>

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "value.hpp"

namespace toolmem {

/// Newline-delimited JSON framing over a pair of file descriptors. One JSON
/// value per line; writes are atomic with respect to each other.
class LineTransport {
public:
    LineTransport(int read_fd, int write_fd, bool own_fds, pid_t child_pid = -1);
    ~LineTransport();

    LineTransport(const LineTransport&) = delete;
    LineTransport& operator=(const LineTransport&) = delete;

    /// False on EOF. Single-reader.
    bool read_line(std::string& line);
    void write_line(const std::string& line);

    void close_write();

private:
    int read_fd_;
    int write_fd_;
    bool own_fds_;
    pid_t child_pid_;
    std::string buffer_;
    std::mutex write_mutex_;
};

/// Runs `command` through /bin/sh with pipes on stdin/stdout; stderr passes
/// through. The transport reaps the child on destruction.
std::unique_ptr<LineTransport> spawn_subprocess(const std::string& command);

std::unique_ptr<LineTransport> connect_tcp(const std::string& host, int port);

/// Listening socket; accept() yields one transport per connection.
class TcpListener {
public:
    explicit TcpListener(int port);  // 0 picks an ephemeral port
    ~TcpListener();

    int port() const { return port_; }
    std::unique_ptr<LineTransport> accept();
    void close();

private:
    int fd_ = -1;
    int port_ = 0;
};

namespace jsonrpc {

Value make_request(std::int64_t id, const std::string& method, Value params);
Value make_notification(const std::string& method, Value params);
Value make_result(const Value& id, Value result);
Value make_error(const Value& id, int code, const std::string& message);

/// Parses one frame; malformed JSON or a non-object yields nullopt.
std::optional<Value> parse_frame(const std::string& line);

}  // namespace jsonrpc

}  // namespace toolmem
