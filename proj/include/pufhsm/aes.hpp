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

#ifndef PUFHSM_AES_HPP_
#define PUFHSM_AES_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pufhsm {

using Block = std::array<std::uint8_t, 16>;

struct AesKey {
  std::array<std::uint8_t, 16> bytes{};
  friend bool operator==(const AesKey&, const AesKey&) = default;
};

// Initial counter block for CTR mode.
struct Iv {
  std::array<std::uint8_t, 16> bytes{};
  friend bool operator==(const Iv&, const Iv&) = default;
};

// AES-128 key schedule; round_keys[0] is the cipher key itself.
struct RoundKeySchedule {
  std::array<Block, 11> round_keys{};
  friend bool operator==(const RoundKeySchedule&, const RoundKeySchedule&) = default;
};

RoundKeySchedule ExpandKey(const AesKey& key);

Block EncryptBlock(const Block& block, const RoundKeySchedule& schedule);
Block DecryptBlock(const Block& block, const RoundKeySchedule& schedule);

// Keystream block i is E(iv + i mod 2^128), counter big-endian.
std::vector<std::uint8_t> CtrTransform(const AesKey& key, const Iv& iv,
                                       std::span<const std::uint8_t> data);
void CtrTransformInPlace(const AesKey& key, const Iv& iv,
                         std::span<std::uint8_t> data);

}  // namespace pufhsm

#endif  // PUFHSM_AES_HPP_
