// Copyright 2026 The pufhsm Authors
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

#include "pufhsm/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <deque>
#include <vector>

#include "pufhsm/error.hpp"

namespace pufhsm {
namespace {

struct PipeBuffers {
  std::deque<std::uint8_t> a_to_b;
  std::deque<std::uint8_t> b_to_a;
};

class PipeEnd : public ByteStream {
 public:
  PipeEnd(std::shared_ptr<PipeBuffers> buffers, bool is_a)
      : buffers_(std::move(buffers)), is_a_(is_a) {}

  void Write(std::span<const std::uint8_t> data) override {
    auto& q = is_a_ ? buffers_->a_to_b : buffers_->b_to_a;
    q.insert(q.end(), data.begin(), data.end());
  }

  std::size_t Read(std::span<std::uint8_t> buffer) override {
    auto& q = is_a_ ? buffers_->b_to_a : buffers_->a_to_b;
    const std::size_t n = std::min(buffer.size(), q.size());
    std::copy_n(q.begin(), n, buffer.begin());
    q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

 private:
  std::shared_ptr<PipeBuffers> buffers_;
  bool is_a_;
};

// Reads exactly buffer.size() bytes; returns the count actually read.
std::size_t ReadFully(ByteStream& stream, std::span<std::uint8_t> buffer) {
  std::size_t got = 0;
  while (got < buffer.size()) {
    const std::size_t n = stream.Read(buffer.subspan(got));
    if (n == 0) break;
    got += n;
  }
  return got;
}

std::string ErrnoMessage(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

}  // namespace

StreamPair MakeInProcessPipe() {
  auto buffers = std::make_shared<PipeBuffers>();
  return {std::make_unique<PipeEnd>(buffers, true), std::make_unique<PipeEnd>(buffers, false)};
}

void FrameDroppingStream::Write(std::span<const std::uint8_t> data) {
  if (data.size() >= 2 && data[0] == kSof && drop_ && drop_(data[1])) {
    ++dropped_;
    return;
  }
  inner_.Write(data);
}

// ---------------------------------------------------------------------------
// Sockets

SocketStream::~SocketStream() {
  if (fd_ >= 0) ::close(fd_);
}

SocketStream& SocketStream::operator=(SocketStream&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void SocketStream::Write(std::span<const std::uint8_t> data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail(ErrorCode::kIo, ErrnoMessage("socket send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::size_t SocketStream::Read(std::span<std::uint8_t> buffer) {
  while (true) {
    const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      Fail(ErrorCode::kIo, ErrnoMessage("socket recv"));
    }
    return static_cast<std::size_t>(n);
  }
}

void SocketStream::Close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

TcpListener TcpListener::Bind(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) Fail(ErrorCode::kIo, ErrnoMessage("socket"));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    Fail(ErrorCode::kInvalidArgument, "not an IPv4 address: " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd, 1) != 0) {
    const std::string msg = ErrnoMessage("bind/listen " + host);
    ::close(fd);
    Fail(ErrorCode::kIo, msg);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return TcpListener(fd, ntohs(addr.sin_port));
}

TcpListener::~TcpListener() { Release(); }

void TcpListener::Release() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

SocketStream TcpListener::Accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return SocketStream(fd);
    if (errno != EINTR) Fail(ErrorCode::kIo, ErrnoMessage("accept"));
  }
}

SocketStream ConnectTcp(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) Fail(ErrorCode::kIo, ErrnoMessage("socket"));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    Fail(ErrorCode::kInvalidArgument, "not an IPv4 address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string msg = ErrnoMessage("connect " + host);
    ::close(fd);
    Fail(ErrorCode::kIo, msg);
  }
  return SocketStream(fd);
}

std::pair<std::string, std::uint16_t> ParseHostPort(const std::string& address) {
  const auto colon = address.rfind(':');
  Require(colon != std::string::npos && colon > 0 && colon + 1 < address.size(),
          "address must look like host:port");
  const std::string port_text = address.substr(colon + 1);
  Require(port_text.size() <= 5 && std::all_of(port_text.begin(), port_text.end(),
                      [](char c) { return c >= '0' && c <= '9'; }),
          "port must be numeric");
  const unsigned long port = std::stoul(port_text);
  Require(port <= 65535, "port out of range");
  return {address.substr(0, colon), static_cast<std::uint16_t>(port)};
}

// ---------------------------------------------------------------------------
// Framing over streams

std::optional<Frame> ReadFrame(ByteStream& stream) {
  std::vector<std::uint8_t> buf(4);
  if (stream.Read(std::span(buf).first(1)) == 0) return std::nullopt;
  if (buf[0] != kSof) Fail(ErrorCode::kBadSof, "frame does not start with 0xA5");
  if (ReadFully(stream, std::span(buf).subspan(1, 3)) != 3) {
    Fail(ErrorCode::kTruncated, "stream closed inside a frame header");
  }
  const std::size_t length = (std::size_t{buf[2]} << 8) | buf[3];
  if (length > kMaxPayload) {
    Fail(ErrorCode::kOversize, "frame declares " + std::to_string(length) + " payload bytes");
  }
  buf.resize(length + kFrameOverhead);
  if (ReadFully(stream, std::span(buf).subspan(4)) != length + 2) {
    Fail(ErrorCode::kTruncated, "stream closed inside a frame");
  }
  return DecodeFrame(buf);
}

void SendMessage(ByteStream& stream, MessageType type, std::span<const std::uint8_t> payload) {
  for (const auto& frame : EncodeMessage(type, payload)) stream.Write(frame);
}

}  // namespace pufhsm
