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

#include <gtest/gtest.h>

#include <bit>

#include "pufhsm/error.hpp"
#include "test_util.hpp"

namespace pufhsm {
namespace {

using testing::RandomBytes;

std::string BitString(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

// Bit j of the zero-padded stream lands in buffer (j mod 128) / 16 at
// position j mod 16; the PIN mask repeats the XOR of the digit bytes.
std::array<std::uint16_t, 8> OracleChallenges(const std::vector<std::uint8_t>& key,
                                              const std::string& pin) {
  std::array<std::uint16_t, 8> buf{};
  for (std::size_t j = 0; j < key.size() * 8; ++j) {
    const bool bit = (key[j / 8] >> (7 - j % 8)) & 1;
    if (!bit) continue;
    const std::size_t p = j % 128;
    buf[p / 16] ^= static_cast<std::uint16_t>(0x8000u >> (p % 16));
  }
  std::uint8_t f = 0;
  for (char c : pin) f ^= static_cast<std::uint8_t>(c);
  for (auto& b : buf) b ^= static_cast<std::uint16_t>(f << 8 | f);
  return buf;
}

TEST(PinTest, Validation) {
  EXPECT_EQ(Pin::Parse("1234").digits(), "1234");
  EXPECT_EQ(Pin::Parse("123456789012").digits(), "123456789012");
  for (const char* bad : {"", "123", "1234567890123", "12a4", " 1234", "12-34"}) {
    EXPECT_THROW(Pin::Parse(bad), Error) << bad;
  }
}

TEST(KeyToBitsTest, Expansion) {
  EXPECT_EQ(BitString(KeyToBits(std::vector<std::uint8_t>{0xA5})), "10100101");
  EXPECT_EQ(BitString(KeyToBits(std::vector<std::uint8_t>{0x00, 0xFF})), "0000000011111111");
  try {
    KeyToBits({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(PinMaskTest, XorOfDigits) {
  EXPECT_EQ(PinMask(Pin::Parse("0000")), 0x0000);
  EXPECT_EQ(PinMask(Pin::Parse("12345")), 0x3131);
  EXPECT_EQ(PinMask(Pin::Parse("1000")), 0x0101);
}

TEST(DeriveChallengesTest, ZeroKeyGivesMask) {
  const std::vector<std::uint8_t> zeros(256, 0);
  for (const char* pin : {"0000", "12345", "987654"}) {
    const auto cs = DeriveChallengesFromKey(zeros, Pin::Parse(pin));
    for (const auto& c : cs.challenges) {
      EXPECT_EQ(c.ToWord(), PinMask(Pin::Parse(pin))) << pin;
      EXPECT_EQ(c.width(), 16u);
    }
  }
}

TEST(DeriveChallengesTest, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 500; ++t) {
    const auto key = RandomBytes(1 + rng() % 400, rng());
    std::string pin;
    const std::size_t len = 4 + rng() % 9;
    for (std::size_t i = 0; i < len; ++i) pin += static_cast<char>('0' + rng() % 10);
    const auto cs = DeriveChallengesFromKey(key, Pin::Parse(pin));
    const auto want = OracleChallenges(key, pin);
    for (std::size_t k = 0; k < 8; ++k) ASSERT_EQ(cs.challenges[k].ToWord(), want[k]);
    ASSERT_EQ(DeriveChallengesFromKey(key, Pin::Parse(pin)), cs);
  }
}

TEST(DeriveChallengesTest, RawBitsEntryPoint) {
  const std::vector<std::uint8_t> bits{1, 0, 1};
  const auto cs = DeriveChallenges(bits, Pin::Parse("0000"));
  EXPECT_EQ(cs.challenges[0].ToString(), "1010000000000000");
  for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(cs.challenges[k].ToWord(), 0u);
  EXPECT_THROW(DeriveChallenges({}, Pin::Parse("0000")), Error);
}

TEST(DeriveChallengesTest, SingleBitFlipSweep2048) {
  const auto pin = Pin::Parse("4321");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto key = RandomBytes(256, seed);
    const auto base = DeriveChallengesFromKey(key, pin);
    for (std::size_t j = 0; j < 2048; ++j) {
      key[j / 8] ^= static_cast<std::uint8_t>(0x80u >> (j % 8));
      const auto flipped = DeriveChallengesFromKey(key, pin);
      key[j / 8] ^= static_cast<std::uint8_t>(0x80u >> (j % 8));
      int changed_buffers = 0;
      for (std::size_t k = 0; k < 8; ++k) {
        const auto diff = base.challenges[k].ToWord() ^ flipped.challenges[k].ToWord();
        if (diff == 0) continue;
        ++changed_buffers;
        ASSERT_EQ(std::popcount(diff), 1) << "bit " << j;
        ASSERT_EQ(k, (j % 128) / 16) << "bit " << j;
        ASSERT_EQ(diff, 0x8000u >> (j % 16)) << "bit " << j;
      }
      ASSERT_EQ(changed_buffers, 1) << "bit " << j;
    }
  }
}

TEST(DeriveChallengesTest, PinSeparation) {
  const auto key = RandomBytes(256, 9);
  const auto a = DeriveChallengesFromKey(key, Pin::Parse("1234"));
  const auto b = DeriveChallengesFromKey(key, Pin::Parse("1235"));
  EXPECT_NE(PinMask(Pin::Parse("1234")), PinMask(Pin::Parse("1235")));
  EXPECT_NE(a, b);
  // Same digit multiset gives the same fold.
  EXPECT_EQ(DeriveChallengesFromKey(key, Pin::Parse("4321")), a);
}

TEST(DeriveAuthTokenTest, FixtureRowOneRepeated) {
  const PufInstance puf(TableBackedPuf{CrpTable::LoadCsv(PUFHSM_CRP_FIXTURE)});
  const std::vector<std::uint8_t> zeros(16, 0);
  const auto cs = DeriveChallengesFromKey(zeros, Pin::Parse("0000"));
  const auto token = DeriveAuthToken(puf, cs);
  std::string bits;
  for (std::size_t i = 0; i < 128; ++i) bits += token.bit(i) ? '1' : '0';
  std::string want;
  for (int k = 0; k < 8; ++k) want += "1111111111011110";
  EXPECT_EQ(bits, want);
  EXPECT_EQ(DeriveAuthToken(puf, cs), token);
}

TEST(DeriveAuthTokenTest, LayoutMatchesPerBufferEval) {
  const auto puf = NewSimulatedPuf(17);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto cs = DeriveChallengesFromKey(RandomBytes(64, rng()), Pin::Parse("2468"));
    const auto token = DeriveAuthToken(puf, cs);
    for (std::size_t k = 0; k < 8; ++k) {
      const auto r = puf.Eval(cs.challenges[k]);
      for (std::size_t b = 0; b < 16; ++b) ASSERT_EQ(token.bit(16 * k + b), r[b]);
    }
    ASSERT_EQ(AuthToken::FromHex(token.ToHex()), token);
    ASSERT_EQ(token.ToHex().size(), 32u);
  }
}

TEST(DeriveAuthTokenTest, Errors) {
  const PufInstance table(TableBackedPuf{CrpTable::LoadCsv(PUFHSM_CRP_FIXTURE)});
  const auto cs = DeriveChallengesFromKey(RandomBytes(32, 1), Pin::Parse("1111"));
  try {
    DeriveAuthToken(table, cs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownChallenge);
  }
  const auto wide = NewSimulatedPuf(1, 32, 32);
  try {
    DeriveAuthToken(wide, cs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(AuthToken::FromHex("zz"), Error);
}

}  // namespace
}  // namespace pufhsm
