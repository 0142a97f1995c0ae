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

#include "pufhsm/keybits.hpp"

#include <cctype>

#include "pufhsm/error.hpp"

namespace pufhsm {

Pin Pin::Parse(std::string_view digits) {
  Require(digits.size() >= 4 && digits.size() <= 12, "PIN must have 4 to 12 digits");
  for (char c : digits) {
    Require(std::isdigit(static_cast<unsigned char>(c)) != 0, "PIN may only contain digits");
  }
  return Pin(std::string(digits));
}

std::string AuthToken::ToHex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

AuthToken AuthToken::FromHex(std::string_view hex) {
  Require(hex.size() == 32, "auth token must be 32 hex digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    Fail(ErrorCode::kInvalidArgument, "auth token contains a non-hex character");
  };
  AuthToken t;
  for (std::size_t i = 0; i < 16; ++i) {
    t.bytes[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return t;
}

std::vector<std::uint8_t> KeyToBits(std::span<const std::uint8_t> key_file) {
  Require(!key_file.empty(), "key file is empty");
  std::vector<std::uint8_t> bits;
  bits.reserve(key_file.size() * 8);
  for (auto byte : key_file) {
    for (int i = 7; i >= 0; --i) bits.push_back((byte >> i) & 1U);
  }
  return bits;
}

std::uint16_t PinMask(const Pin& pin) {
  std::uint8_t fold = 0;
  for (char c : pin.digits()) fold ^= static_cast<std::uint8_t>(c);
  return static_cast<std::uint16_t>((fold << 8) | fold);
}

ChallengeSet DeriveChallenges(std::span<const std::uint8_t> bits, const Pin& pin) {
  Require(!bits.empty(), "key bit sequence is empty");
  std::array<std::uint16_t, kBufferCount> buffers{};
  // Zero padding to a multiple of 128 bits contributes nothing to an XOR fold.
  for (std::size_t i = 0; i < bits.size(); ++i) {
    Require(bits[i] <= 1, "bit values must be 0 or 1");
    if (!bits[i]) continue;
    const std::size_t word = i / kBufferWidth;
    const std::size_t pos = i % kBufferWidth;
    buffers[word % kBufferCount] ^= static_cast<std::uint16_t>(1U << (kBufferWidth - 1 - pos));
  }
  const std::uint16_t mask = PinMask(pin);
  ChallengeSet out;
  for (std::size_t b = 0; b < kBufferCount; ++b) {
    out.challenges[b] = Challenge::FromWord(buffers[b] ^ mask, kBufferWidth);
  }
  return out;
}

ChallengeSet DeriveChallengesFromKey(std::span<const std::uint8_t> key_file,
                                     const Pin& pin) {
  return DeriveChallenges(KeyToBits(key_file), pin);
}

AuthToken DeriveAuthToken(const PufInstance& puf, const ChallengeSet& challenges) {
  Require(puf.width() == kBufferWidth, "auth token derivation needs a 16-bit PUF");
  AuthToken token;
  for (std::size_t b = 0; b < kBufferCount; ++b) {
    const Response r = puf.Eval(challenges.challenges[b]);
    const std::uint64_t word = r.ToWord();
    token.bytes[2 * b] = static_cast<std::uint8_t>(word >> 8);
    token.bytes[2 * b + 1] = static_cast<std::uint8_t>(word);
  }
  return token;
}

}  // namespace pufhsm
