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

#ifndef PUFHSM_TRANSPORT_HPP_
#define PUFHSM_TRANSPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "pufhsm/frame.hpp"

namespace pufhsm {

// One end of a duplex byte stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void Write(std::span<const std::uint8_t> data) = 0;
  // Returns the number of bytes read; 0 means no further bytes will arrive
  // (peer closed, or nothing buffered on a non-blocking pipe).
  virtual std::size_t Read(std::span<std::uint8_t> buffer) = 0;
  virtual void Close() {}
};

struct StreamPair {
  std::unique_ptr<ByteStream> first;
  std::unique_ptr<ByteStream> second;
};

// Single-threaded in-process pipe. Reads never block; they return whatever
// the peer has written so far.
StreamPair MakeInProcessPipe();

// Forwards to `inner` but silently discards written frames whose msg_type
// satisfies `drop`. Writes must be whole encoded frames.
class FrameDroppingStream : public ByteStream {
 public:
  FrameDroppingStream(ByteStream& inner, std::function<bool(std::uint8_t)> drop)
      : inner_(inner), drop_(std::move(drop)) {}

  void Write(std::span<const std::uint8_t> data) override;
  std::size_t Read(std::span<std::uint8_t> buffer) override { return inner_.Read(buffer); }
  void Close() override { inner_.Close(); }

  std::size_t dropped() const { return dropped_; }

 private:
  ByteStream& inner_;
  std::function<bool(std::uint8_t)> drop_;
  std::size_t dropped_ = 0;
};

// Connected TCP socket.
class SocketStream : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {}
  ~SocketStream() override;
  SocketStream(SocketStream&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  SocketStream& operator=(SocketStream&& other) noexcept;
  SocketStream(const SocketStream&) = delete;
  SocketStream& operator=(const SocketStream&) = delete;

  void Write(std::span<const std::uint8_t> data) override;
  std::size_t Read(std::span<std::uint8_t> buffer) override;
  // Half-closes the write side so the peer sees end of stream.
  void Close() override;

 private:
  int fd_;
};

class TcpListener {
 public:
  // Port 0 picks an ephemeral port.
  static TcpListener Bind(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  SocketStream Accept();
  void Release();

 private:
  TcpListener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}
  int fd_;
  std::uint16_t port_;
};

SocketStream ConnectTcp(const std::string& host, std::uint16_t port);

// "host:port" → (host, port).
std::pair<std::string, std::uint16_t> ParseHostPort(const std::string& address);

// Reads one frame. Returns nullopt when the stream ends cleanly before a new
// frame starts; throws kTruncated if it ends mid-frame and the DecodeFrame
// errors otherwise.
std::optional<Frame> ReadFrame(ByteStream& stream);

void SendMessage(ByteStream& stream, MessageType type, std::span<const std::uint8_t> payload);

}  // namespace pufhsm

#endif  // PUFHSM_TRANSPORT_HPP_
