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

#include "pufhsm/aes.hpp"

#include <algorithm>
#include <cstring>

namespace pufhsm {
namespace {

constexpr std::uint8_t Xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t GfMul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a = Xtime(a);
    b >>= 1;
  }
  return r;
}

constexpr std::uint8_t GfInverse(std::uint8_t x) {
  if (x == 0) return 0;
  // x^254 = x^-1 in GF(2^8).
  std::uint8_t result = 1;
  std::uint8_t base = x;
  for (int e = 254; e > 0; e >>= 1) {
    if (e & 1) result = GfMul(result, base);
    base = GfMul(base, base);
  }
  return result;
}

constexpr std::uint8_t Rotl8(std::uint8_t x, int n) {
  return static_cast<std::uint8_t>((x << n) | (x >> (8 - n)));
}

constexpr std::array<std::uint8_t, 256> MakeSbox() {
  std::array<std::uint8_t, 256> s{};
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t b = GfInverse(static_cast<std::uint8_t>(i));
    s[i] = static_cast<std::uint8_t>(b ^ Rotl8(b, 1) ^ Rotl8(b, 2) ^ Rotl8(b, 3) ^
                                     Rotl8(b, 4) ^ 0x63);
  }
  return s;
}

constexpr auto kSbox = MakeSbox();

constexpr std::array<std::uint8_t, 256> MakeInvSbox() {
  std::array<std::uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<std::uint8_t>(i);
  return inv;
}

constexpr auto kInvSbox = MakeInvSbox();

static_assert(kSbox[0x00] == 0x63 && kSbox[0x53] == 0xed);

// Te tables fuse SubBytes and MixColumns; word layout is row 0 in the high
// byte.
constexpr std::array<std::array<std::uint32_t, 256>, 4> MakeTe() {
  std::array<std::array<std::uint32_t, 256>, 4> t{};
  for (int i = 0; i < 256; ++i) {
    const std::uint32_t s = kSbox[i];
    const std::uint32_t s2 = Xtime(kSbox[i]);
    const std::uint32_t s3 = s2 ^ s;
    const std::uint32_t w = (s2 << 24) | (s << 16) | (s << 8) | s3;
    t[0][i] = w;
    t[1][i] = (w >> 8) | (w << 24);
    t[2][i] = (w >> 16) | (w << 16);
    t[3][i] = (w >> 24) | (w << 8);
  }
  return t;
}

constexpr auto kTe = MakeTe();

inline std::uint32_t LoadWord(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

inline void StoreWord(std::uint8_t* p, std::uint32_t w) {
  p[0] = static_cast<std::uint8_t>(w >> 24);
  p[1] = static_cast<std::uint8_t>(w >> 16);
  p[2] = static_cast<std::uint8_t>(w >> 8);
  p[3] = static_cast<std::uint8_t>(w);
}

inline std::uint8_t Byte(std::uint32_t w, int row) {
  return static_cast<std::uint8_t>(w >> (24 - 8 * row));
}

// Round keys as 44 column words.
struct WordSchedule {
  std::array<std::uint32_t, 44> w;
};

WordSchedule ToWords(const RoundKeySchedule& schedule) {
  WordSchedule ws{};
  for (int r = 0; r < 11; ++r) {
    for (int c = 0; c < 4; ++c) ws.w[4 * r + c] = LoadWord(&schedule.round_keys[r][4 * c]);
  }
  return ws;
}

void EncryptWords(const WordSchedule& ks, const std::uint8_t* in, std::uint8_t* out) {
  std::uint32_t s0 = LoadWord(in) ^ ks.w[0];
  std::uint32_t s1 = LoadWord(in + 4) ^ ks.w[1];
  std::uint32_t s2 = LoadWord(in + 8) ^ ks.w[2];
  std::uint32_t s3 = LoadWord(in + 12) ^ ks.w[3];
  for (int round = 1; round < 10; ++round) {
    const std::uint32_t* rk = &ks.w[4 * round];
    const std::uint32_t t0 = kTe[0][Byte(s0, 0)] ^ kTe[1][Byte(s1, 1)] ^
                             kTe[2][Byte(s2, 2)] ^ kTe[3][Byte(s3, 3)] ^ rk[0];
    const std::uint32_t t1 = kTe[0][Byte(s1, 0)] ^ kTe[1][Byte(s2, 1)] ^
                             kTe[2][Byte(s3, 2)] ^ kTe[3][Byte(s0, 3)] ^ rk[1];
    const std::uint32_t t2 = kTe[0][Byte(s2, 0)] ^ kTe[1][Byte(s3, 1)] ^
                             kTe[2][Byte(s0, 2)] ^ kTe[3][Byte(s1, 3)] ^ rk[2];
    const std::uint32_t t3 = kTe[0][Byte(s3, 0)] ^ kTe[1][Byte(s0, 1)] ^
                             kTe[2][Byte(s1, 2)] ^ kTe[3][Byte(s2, 3)] ^ rk[3];
    s0 = t0;
    s1 = t1;
    s2 = t2;
    s3 = t3;
  }
  // Final round: SubBytes, ShiftRows, AddRoundKey.
  const std::uint32_t* rk = &ks.w[40];
  const std::uint32_t cols[4] = {s0, s1, s2, s3};
  for (int c = 0; c < 4; ++c) {
    const std::uint32_t w =
        (std::uint32_t{kSbox[Byte(cols[c], 0)]} << 24) |
        (std::uint32_t{kSbox[Byte(cols[(c + 1) % 4], 1)]} << 16) |
        (std::uint32_t{kSbox[Byte(cols[(c + 2) % 4], 2)]} << 8) |
        std::uint32_t{kSbox[Byte(cols[(c + 3) % 4], 3)]};
    StoreWord(out + 4 * c, w ^ rk[c]);
  }
}

void AddRoundKey(Block& state, const Block& rk) {
  for (int i = 0; i < 16; ++i) state[i] ^= rk[i];
}

void InvShiftRows(Block& s) {
  Block t = s;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
  }
}

void InvSubBytes(Block& s) {
  for (auto& b : s) b = kInvSbox[b];
}

void InvMixColumns(Block& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = GfMul(a0, 14) ^ GfMul(a1, 11) ^ GfMul(a2, 13) ^ GfMul(a3, 9);
    col[1] = GfMul(a0, 9) ^ GfMul(a1, 14) ^ GfMul(a2, 11) ^ GfMul(a3, 13);
    col[2] = GfMul(a0, 13) ^ GfMul(a1, 9) ^ GfMul(a2, 14) ^ GfMul(a3, 11);
    col[3] = GfMul(a0, 11) ^ GfMul(a1, 13) ^ GfMul(a2, 9) ^ GfMul(a3, 14);
  }
}

void IncrementCounter(Block& counter) {
  for (int i = 15; i >= 0; --i) {
    if (++counter[i] != 0) break;
  }
}

}  // namespace

RoundKeySchedule ExpandKey(const AesKey& key) {
  std::array<std::uint32_t, 44> w{};
  for (int i = 0; i < 4; ++i) w[i] = LoadWord(&key.bytes[4 * i]);
  std::uint8_t rcon = 0x01;
  for (int i = 4; i < 44; ++i) {
    std::uint32_t temp = w[i - 1];
    if (i % 4 == 0) {
      temp = (temp << 8) | (temp >> 24);  // RotWord
      temp = (std::uint32_t{kSbox[Byte(temp, 0)]} << 24) |
             (std::uint32_t{kSbox[Byte(temp, 1)]} << 16) |
             (std::uint32_t{kSbox[Byte(temp, 2)]} << 8) |
             std::uint32_t{kSbox[Byte(temp, 3)]};  // SubWord
      temp ^= std::uint32_t{rcon} << 24;
      rcon = Xtime(rcon);
    }
    w[i] = w[i - 4] ^ temp;
  }
  RoundKeySchedule schedule;
  for (int r = 0; r < 11; ++r) {
    for (int c = 0; c < 4; ++c) StoreWord(&schedule.round_keys[r][4 * c], w[4 * r + c]);
  }
  return schedule;
}

Block EncryptBlock(const Block& block, const RoundKeySchedule& schedule) {
  const WordSchedule ws = ToWords(schedule);
  Block out{};
  EncryptWords(ws, block.data(), out.data());
  return out;
}

Block DecryptBlock(const Block& block, const RoundKeySchedule& schedule) {
  Block state = block;
  AddRoundKey(state, schedule.round_keys[10]);
  for (int round = 9; round >= 1; --round) {
    InvShiftRows(state);
    InvSubBytes(state);
    AddRoundKey(state, schedule.round_keys[round]);
    InvMixColumns(state);
  }
  InvShiftRows(state);
  InvSubBytes(state);
  AddRoundKey(state, schedule.round_keys[0]);
  return state;
}

void CtrTransformInPlace(const AesKey& key, const Iv& iv, std::span<std::uint8_t> data) {
  const WordSchedule ws = ToWords(ExpandKey(key));
  Block counter = iv.bytes;
  Block keystream{};
  std::size_t offset = 0;
  while (offset < data.size()) {
    EncryptWords(ws, counter.data(), keystream.data());
    IncrementCounter(counter);
    const std::size_t n = std::min<std::size_t>(16, data.size() - offset);
    std::uint8_t* p = data.data() + offset;
    if (n == 16) {
      std::uint64_t d[2], k[2];
      std::memcpy(d, p, 16);
      std::memcpy(k, keystream.data(), 16);
      d[0] ^= k[0];
      d[1] ^= k[1];
      std::memcpy(p, d, 16);
    } else {
      for (std::size_t i = 0; i < n; ++i) p[i] ^= keystream[i];
    }
    offset += n;
  }
}

std::vector<std::uint8_t> CtrTransform(const AesKey& key, const Iv& iv,
                                       std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  CtrTransformInPlace(key, iv, out);
  return out;
}

}  // namespace pufhsm
