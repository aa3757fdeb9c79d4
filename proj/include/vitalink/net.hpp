// Copyright 2026 The VitaLink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
////////////////////////////////////////////////////////////////////////////////

#ifndef VITALINK_NET_HPP
#define VITALINK_NET_HPP

// Blocking TCP sockets behind the ByteStream interface. Timeouts use poll().

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "vitalink/error.hpp"
#include "vitalink/stream.hpp"

namespace vitalink::net {

struct Address {
  std::string host;
  std::uint16_t port = 0;

  std::string str() const {
    return host.find(':') != std::string::npos ? "[" + host + "]:" + std::to_string(port)
                                               : host + ":" + std::to_string(port);
  }
};

// Parses "host:port" or "[v6]:port".
inline Address parse_address(std::string_view s) {
  auto bad = [&] { return Error(Errc::Config, "bad address '" + std::string(s) + "'"); };
  std::size_t colon = s.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == s.size()) throw bad();
  std::string_view host = s.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
    host = host.substr(1, host.size() - 2);
  if (host.empty()) throw bad();
  unsigned long port = 0;
  for (char c : s.substr(colon + 1)) {
    if (c < '0' || c > '9') throw bad();
    port = port * 10 + static_cast<unsigned long>(c - '0');
    if (port > 65535) throw bad();
  }
  return Address{std::string(host), static_cast<std::uint16_t>(port)};
}

namespace detail {

inline Error sys_error(Errc code, const std::string& what) {
  return Error(code, what + ": " + std::strerror(errno));
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) freeaddrinfo(head);
  }
};

inline void resolve(const Address& a, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(a.port);
  int rc = getaddrinfo(a.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) throw Error(Errc::Config, "cannot resolve " + a.host + ": " + gai_strerror(rc));
}

inline bool poll_fd(int fd, short events, Millis timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc >= 0) return rc > 0;
    if (errno != EINTR) throw sys_error(Errc::Io, "poll");
  }
}

}  // namespace detail

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpStream() override { close(); }
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  std::size_t read_some(std::span<std::uint8_t> out, Millis timeout) override {
    if (out.empty()) return 0;
    if (!detail::poll_fd(fd_, POLLIN, timeout)) throw Error(Errc::Timeout, "no data received");
    for (;;) {
      ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw detail::sys_error(Errc::Io, "recv");
    }
  }

  void write_all(ByteView data) override {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET)
          throw Error(Errc::ConnectionClosed, "peer closed the connection");
        throw detail::sys_error(Errc::Io, "send");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  bool readable(Millis timeout) override { return detail::poll_fd(fd_, POLLIN, timeout); }

  // Wakes any thread blocked on this socket without releasing the descriptor.
  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  void shutdown_write() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  int fd() const { return fd_; }

 private:
  int fd_;
};

inline std::unique_ptr<TcpStream> connect(const Address& a, Millis timeout = Millis{10'000}) {
  detail::AddrInfo ai;
  detail::resolve(a, false, ai);
  int last_errno = ECONNREFUSED;
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    int fd = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
    if (fd < 0) continue;
    int flags = ::fcntl(fd, F_GETFL);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, p->ai_addr, p->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      if (detail::poll_fd(fd, POLLOUT, timeout)) {
        socklen_t len = sizeof rc;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &rc, &len);
        errno = rc;
        rc = rc ? -1 : 0;
      } else {
        errno = ETIMEDOUT;
        rc = -1;
      }
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      return std::make_unique<TcpStream>(fd);
    }
    last_errno = errno;
    ::close(fd);
  }
  errno = last_errno;
  if (last_errno == ETIMEDOUT) throw detail::sys_error(Errc::Timeout, "connect " + a.str());
  throw detail::sys_error(Errc::ConnectionRefused, "connect " + a.str());
}

class Listener {
 public:
  explicit Listener(const Address& a) {
    detail::AddrInfo ai;
    detail::resolve(a, true, ai);
    for (addrinfo* p = ai.head; p; p = p->ai_next) {
      int fd = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    if (fd_ < 0) throw detail::sys_error(Errc::Io, "bind " + a.str());
    sockaddr_storage ss{};
    socklen_t len = sizeof ss;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&ss), &len);
    char buf[INET6_ADDRSTRLEN] = {};
    if (ss.ss_family == AF_INET6) {
      auto* s6 = reinterpret_cast<sockaddr_in6*>(&ss);
      ::inet_ntop(AF_INET6, &s6->sin6_addr, buf, sizeof buf);
      local_ = Address{buf, ntohs(s6->sin6_port)};
    } else {
      auto* s4 = reinterpret_cast<sockaddr_in*>(&ss);
      ::inet_ntop(AF_INET, &s4->sin_addr, buf, sizeof buf);
      local_ = Address{buf, ntohs(s4->sin_port)};
    }
  }
  ~Listener() { close(); }
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  const Address& local() const { return local_; }

  // Returns nullptr if nothing connected within the timeout.
  std::unique_ptr<TcpStream> accept(Millis timeout) {
    if (fd_ < 0 || !detail::poll_fd(fd_, POLLIN, timeout)) return nullptr;
    int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED || errno == EAGAIN) return nullptr;
      throw detail::sys_error(Errc::Io, "accept");
    }
    return std::make_unique<TcpStream>(fd);
  }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  Address local_;
};

}  // namespace vitalink::net

#endif  // VITALINK_NET_HPP
