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

#ifndef PUFHSM_FRAME_HPP_
#define PUFHSM_FRAME_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pufhsm {

enum class MessageType : std::uint8_t {
  kEnroll = 0x01,
  kAuthRequest = 0x02,
  kAuthOk = 0x10,
  kAuthFail = 0x11,
  kDecryptRequest = 0x20,
  kDecryptResult = 0x21,
  kError = 0x7F,
};

bool IsKnownMessageType(std::uint8_t type);
const char* MessageTypeName(std::uint8_t type);

inline constexpr std::uint8_t kSof = 0xA5;
inline constexpr std::size_t kMaxPayload = 4096;
inline constexpr std::size_t kFrameOverhead = 6;  // sof, type, len[2], crc[2]
// Set on msg_type when more fragments of the same message follow.
inline constexpr std::uint8_t kMoreFragments = 0x80;

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final XOR.
std::uint16_t Crc16CcittFalse(std::span<const std::uint8_t> data);

struct Frame {
  std::uint8_t msg_type = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

// SOF | msg_type | length (BE16) | payload | crc (BE16) over
// msg_type || length || payload.
std::vector<std::uint8_t> EncodeFrame(std::uint8_t msg_type,
                                      std::span<const std::uint8_t> payload);

// Decodes exactly one complete frame; the last two bytes of `bytes` are taken
// as the CRC. Errors, in check order: kBadSof, kTruncated (fewer than six
// bytes), kBadCrc, kOversize, kTruncated (length field exceeds the buffer),
// kFormat (buffer longer than the length field says), kUnknownType.
Frame DecodeFrame(std::span<const std::uint8_t> bytes);

// Splits a message into frames of at most kMaxPayload bytes, setting
// kMoreFragments on every frame but the last.
std::vector<std::vector<std::uint8_t>> EncodeMessage(MessageType type,
                                                     std::span<const std::uint8_t> payload);

// Concatenates fragments in arrival order.
class MessageAssembler {
 public:
  // Returns the completed message once its final fragment arrives.
  std::optional<Frame> Push(const Frame& fragment);
  bool pending() const { return pending_.has_value(); }

 private:
  std::optional<Frame> pending_;
};

}  // namespace pufhsm

#endif  // PUFHSM_FRAME_HPP_
