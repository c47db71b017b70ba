#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nxs::net {

/// Owning POSIX socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close() noexcept;
  /// Unblocks a reader on another thread.
  void shutdown() noexcept;

  /// Waits up to `timeout` for readability. False on timeout.
  bool wait_readable(std::chrono::milliseconds timeout) const;

  /// Reads exactly buf.size() bytes unless the peer closes (returns bytes
  /// read so far) or `stop` becomes true. Throws Errc::io_error on errors.
  std::size_t read_exact(std::span<std::uint8_t> buf, const std::atomic<bool>& stop) const;
  /// Sends everything (blocking). Throws Errc::io_error.
  void write_all(std::span<const std::uint8_t> buf) const;

  std::uint16_t local_port() const;

 private:
  int fd_ = -1;
};

/// Throws Errc::connect_failed.
Socket tcp_connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);
/// Listening socket on 127.0.0.1 (or any address when `any` is set); port 0 picks a free port.
Socket tcp_listen(std::uint16_t port, bool any = false);
/// Waits up to `timeout` for a connection; invalid socket on timeout.
Socket tcp_accept(const Socket& listener, std::chrono::milliseconds timeout);

Socket udp_bind(std::uint16_t port, bool any = false);
/// UDP socket connected to a destination so send() can be used.
Socket udp_connect(const std::string& host, std::uint16_t port);
/// Best-effort non-blocking datagram send; false if the datagram was not queued.
bool udp_send(const Socket& s, std::span<const std::uint8_t> datagram);
/// Receives one datagram into `buf` (resized to the datagram length).
bool udp_recv(const Socket& s, std::vector<std::uint8_t>& buf, std::chrono::milliseconds timeout);

}  // namespace nxs::net
