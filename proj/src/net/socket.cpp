#include "nxs/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::net {

namespace {

std::string errno_text() { return std::strerror(errno); }

sockaddr_in make_addr(std::uint16_t port, bool any) {
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(port);
  a.sin_addr.s_addr = htonl(any ? INADDR_ANY : INADDR_LOOPBACK);
  return a;
}

sockaddr_in resolve(const std::string& host, std::uint16_t port, int socktype) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = socktype;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
  if (rc != 0 || !res) {
    throw Error(Errc::connect_failed, fmt::format("cannot resolve '{}': {}", host, ::gai_strerror(rc)));
  }
  sockaddr_in a{};
  std::memcpy(&a, res->ai_addr, sizeof(a));
  ::freeaddrinfo(res);
  a.sin_port = htons(port);
  return a;
}

}  // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.release();
  }
  return *this;
}

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

bool Socket::wait_readable(std::chrono::milliseconds timeout) const {
  pollfd p{fd_, POLLIN, 0};
  const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (rc < 0 && errno != EINTR) throw Error(Errc::io_error, "poll: " + errno_text());
  return rc > 0;
}

std::size_t Socket::read_exact(std::span<std::uint8_t> buf, const std::atomic<bool>& stop) const {
  std::size_t got = 0;
  while (got < buf.size()) {
    if (stop.load()) return got;
    if (!wait_readable(std::chrono::milliseconds(100))) continue;
    const ssize_t n = ::recv(fd_, buf.data() + got, buf.size() - got, 0);
    if (n == 0) return got;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) return got;
      throw Error(Errc::io_error, "recv: " + errno_text());
    }
    got += static_cast<std::size_t>(n);
  }
  return got;
}

void Socket::write_all(std::span<const std::uint8_t> buf) const {
  std::size_t sent = 0;
  while (sent < buf.size()) {
    const ssize_t n = ::send(fd_, buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io_error, "send: " + errno_text());
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::uint16_t Socket::local_port() const {
  sockaddr_in a{};
  socklen_t len = sizeof(a);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len) != 0) {
    throw Error(Errc::io_error, "getsockname: " + errno_text());
  }
  return ntohs(a.sin_port);
}

Socket tcp_connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(host, port, SOCK_STREAM);
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(Errc::connect_failed, "socket: " + errno_text());
  const int flags = ::fcntl(s.fd(), F_GETFL, 0);
  ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
  if (rc != 0 && errno != EINPROGRESS) {
    throw Error(Errc::connect_failed, fmt::format("{}:{}: {}", host, port, errno_text()));
  }
  if (rc != 0) {
    pollfd p{s.fd(), POLLOUT, 0};
    rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) throw Error(Errc::connect_failed, fmt::format("{}:{}: timed out", host, port));
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) throw Error(Errc::connect_failed, fmt::format("{}:{}: {}", host, port, std::strerror(err)));
  }
  ::fcntl(s.fd(), F_SETFL, flags);
  const int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

Socket tcp_listen(std::uint16_t port, bool any) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(Errc::io_error, "socket: " + errno_text());
  const int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const sockaddr_in a = make_addr(port, any);
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&a), sizeof(a)) != 0) {
    throw Error(Errc::io_error, fmt::format("bind port {}: {}", port, errno_text()));
  }
  if (::listen(s.fd(), 4) != 0) throw Error(Errc::io_error, "listen: " + errno_text());
  return s;
}

Socket tcp_accept(const Socket& listener, std::chrono::milliseconds timeout) {
  if (!listener.wait_readable(timeout)) return Socket();
  Socket s(::accept(listener.fd(), nullptr, nullptr));
  if (!s.valid()) throw Error(Errc::io_error, "accept: " + errno_text());
  const int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

Socket udp_bind(std::uint16_t port, bool any) {
  Socket s(::socket(AF_INET, SOCK_DGRAM, 0));
  if (!s.valid()) throw Error(Errc::io_error, "socket: " + errno_text());
  const int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const int rcvbuf = 4 << 20;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof(rcvbuf));
  const sockaddr_in a = make_addr(port, any);
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&a), sizeof(a)) != 0) {
    throw Error(Errc::io_error, fmt::format("bind udp port {}: {}", port, errno_text()));
  }
  return s;
}

Socket udp_connect(const std::string& host, std::uint16_t port) {
  const sockaddr_in addr = resolve(host, port, SOCK_DGRAM);
  Socket s(::socket(AF_INET, SOCK_DGRAM, 0));
  if (!s.valid()) throw Error(Errc::connect_failed, "socket: " + errno_text());
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw Error(Errc::connect_failed, fmt::format("udp {}:{}: {}", host, port, errno_text()));
  }
  return s;
}

bool udp_send(const Socket& s, std::span<const std::uint8_t> datagram) {
  const ssize_t n = ::send(s.fd(), datagram.data(), datagram.size(), MSG_DONTWAIT | MSG_NOSIGNAL);
  return n == static_cast<ssize_t>(datagram.size());
}

bool udp_recv(const Socket& s, std::vector<std::uint8_t>& buf, std::chrono::milliseconds timeout) {
  if (!s.wait_readable(timeout)) return false;
  buf.resize(65536);
  const ssize_t n = ::recv(s.fd(), buf.data(), buf.size(), 0);
  if (n < 0) {
    if (errno == EINTR || errno == EAGAIN) return false;
    throw Error(Errc::io_error, "recv: " + errno_text());
  }
  buf.resize(static_cast<std::size_t>(n));
  return true;
}

}  // namespace nxs::net
