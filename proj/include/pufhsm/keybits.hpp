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

#ifndef PUFHSM_KEYBITS_HPP_
#define PUFHSM_KEYBITS_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pufhsm/puf.hpp"

namespace pufhsm {

// PIN passphrase of 4 to 12 decimal digits.
class Pin {
 public:
  static Pin Parse(std::string_view digits);

  const std::string& digits() const { return digits_; }

 private:
  explicit Pin(std::string digits) : digits_(std::move(digits)) {}
  std::string digits_;
};

inline constexpr std::size_t kBufferCount = 8;
inline constexpr std::size_t kBufferWidth = 16;

struct ChallengeSet {
  std::array<Challenge, kBufferCount> challenges;
  friend bool operator==(const ChallengeSet&, const ChallengeSet&) = default;
};

// 128-bit concatenation of eight 16-bit responses; bit 0 is the MSB of
// bytes[0].
struct AuthToken {
  std::array<std::uint8_t, 16> bytes{};

  bool bit(std::size_t i) const { return (bytes[i / 8] >> (7 - i % 8)) & 1U; }
  std::string ToHex() const;
  static AuthToken FromHex(std::string_view hex);

  friend bool operator==(const AuthToken&, const AuthToken&) = default;
  friend auto operator<=>(const AuthToken&, const AuthToken&) = default;
};

// File bytes as bits, most significant bit of each byte first.
std::vector<std::uint8_t> KeyToBits(std::span<const std::uint8_t> key_file);

// XOR of all digit bytes, repeated into both halves of a 16-bit word.
std::uint16_t PinMask(const Pin& pin);

// Bits are zero-padded to a multiple of 128 and cut into 16-bit words; word w
// is XOR-folded into buffer w mod 8, and every buffer is then XORed with the
// PIN mask.
ChallengeSet DeriveChallenges(std::span<const std::uint8_t> bits, const Pin& pin);

ChallengeSet DeriveChallengesFromKey(std::span<const std::uint8_t> key_file,
                                     const Pin& pin);

AuthToken DeriveAuthToken(const PufInstance& puf, const ChallengeSet& challenges);

}  // namespace pufhsm

#endif  // PUFHSM_KEYBITS_HPP_
