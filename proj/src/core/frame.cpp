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

#include "pufhsm/frame.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pufhsm/error.hpp"

namespace pufhsm {

bool IsKnownMessageType(std::uint8_t type) {
  switch (static_cast<MessageType>(type)) {
    case MessageType::kEnroll:
    case MessageType::kAuthRequest:
    case MessageType::kAuthOk:
    case MessageType::kAuthFail:
    case MessageType::kDecryptRequest:
    case MessageType::kDecryptResult:
    case MessageType::kError:
      return true;
  }
  return false;
}

const char* MessageTypeName(std::uint8_t type) {
  switch (static_cast<MessageType>(type & ~kMoreFragments)) {
    case MessageType::kEnroll: return "ENROLL";
    case MessageType::kAuthRequest: return "AUTH_REQUEST";
    case MessageType::kAuthOk: return "AUTH_OK";
    case MessageType::kAuthFail: return "AUTH_FAIL";
    case MessageType::kDecryptRequest: return "DECRYPT_REQUEST";
    case MessageType::kDecryptResult: return "DECRYPT_RESULT";
    case MessageType::kError: return "ERROR";
  }
  return "UNKNOWN";
}

namespace {

constexpr std::array<std::uint16_t, 256> MakeCrcTable() {
  std::array<std::uint16_t, 256> table{};
  for (unsigned i = 0; i < 256; ++i) {
    auto crc = static_cast<std::uint16_t>(i << 8);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                           : static_cast<std::uint16_t>(crc << 1);
    }
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = MakeCrcTable();

}  // namespace

std::uint16_t Crc16CcittFalse(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (auto byte : data) {
    crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFF]);
  }
  return crc;
}

std::vector<std::uint8_t> EncodeFrame(std::uint8_t msg_type,
                                      std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload) {
    Fail(ErrorCode::kOversize, "frame payload of " + std::to_string(payload.size()) +
                                   " bytes exceeds " + std::to_string(kMaxPayload));
  }
  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + kFrameOverhead);
  out.push_back(kSof);
  out.push_back(msg_type);
  out.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint16_t crc = Crc16CcittFalse(std::span(out).subspan(1));
  out.push_back(static_cast<std::uint8_t>(crc >> 8));
  out.push_back(static_cast<std::uint8_t>(crc));
  return out;
}

Frame DecodeFrame(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) Fail(ErrorCode::kTruncated, "empty frame");
  if (bytes[0] != kSof) Fail(ErrorCode::kBadSof, "frame does not start with 0xA5");
  if (bytes.size() < kFrameOverhead) Fail(ErrorCode::kTruncated, "frame shorter than its header");
  const std::size_t n = bytes.size();
  const std::uint16_t expected = static_cast<std::uint16_t>((bytes[n - 2] << 8) | bytes[n - 1]);
  if (Crc16CcittFalse(bytes.subspan(1, n - 3)) != expected) {
    Fail(ErrorCode::kBadCrc, "frame crc mismatch");
  }
  const std::size_t length = (std::size_t{bytes[2]} << 8) | bytes[3];
  if (length > kMaxPayload) {
    Fail(ErrorCode::kOversize, "frame declares " + std::to_string(length) + " payload bytes");
  }
  if (n < length + kFrameOverhead) {
    Fail(ErrorCode::kTruncated, "frame shorter than its declared length");
  }
  if (n > length + kFrameOverhead) Fail(ErrorCode::kFormat, "trailing bytes after frame");
  const std::uint8_t type = bytes[1];
  if (!IsKnownMessageType(type & static_cast<std::uint8_t>(~kMoreFragments))) {
    Fail(ErrorCode::kUnknownType, "unknown message type " + std::to_string(type));
  }
  Frame f;
  f.msg_type = type;
  f.payload.assign(bytes.begin() + 4, bytes.begin() + 4 + static_cast<std::ptrdiff_t>(length));
  return f;
}

std::vector<std::vector<std::uint8_t>> EncodeMessage(MessageType type,
                                                     std::span<const std::uint8_t> payload) {
  std::vector<std::vector<std::uint8_t>> frames;
  const auto base = static_cast<std::uint8_t>(type);
  std::size_t offset = 0;
  do {
    const std::size_t n = std::min(kMaxPayload, payload.size() - offset);
    const bool last = offset + n == payload.size();
    frames.push_back(EncodeFrame(last ? base : static_cast<std::uint8_t>(base | kMoreFragments),
                                 payload.subspan(offset, n)));
    offset += n;
  } while (offset < payload.size());
  return frames;
}

std::optional<Frame> MessageAssembler::Push(const Frame& fragment) {
  const auto type = static_cast<std::uint8_t>(fragment.msg_type & ~kMoreFragments);
  const bool more = (fragment.msg_type & kMoreFragments) != 0;
  if (pending_ && pending_->msg_type != type) {
    pending_.reset();
    Fail(ErrorCode::kFormat, "fragment type changed mid-message");
  }
  if (!pending_) pending_ = Frame{type, {}};
  pending_->payload.insert(pending_->payload.end(), fragment.payload.begin(),
                           fragment.payload.end());
  if (more) return std::nullopt;
  std::optional<Frame> done = std::move(pending_);
  pending_.reset();
  return done;
}

}  // namespace pufhsm
