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

#include "pufhsm/rsa.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "pufhsm/error.hpp"

namespace pufhsm {
namespace {

BigInt PowmOracle(const BigInt& b, const BigInt& e, const BigInt& m) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

bool TrialDivisionPrime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

TEST(RsaTest, ToyKeyPair) {
  const auto kp = RsaKeyPairFromPrimes(61, 53, 17);
  EXPECT_EQ(kp.n, 3233);
  EXPECT_EQ(kp.d, 2753);
  EXPECT_EQ(RsaApply(65, kp.e, kp.n), 2790);
  EXPECT_EQ(RsaApply(2790, kp.d, kp.n), 65);
}

TEST(RsaTest, ToyPairExhaustiveRoundTrip) {
  const auto kp = RsaKeyPairFromPrimes(61, 53, 17);
  for (unsigned long m = 0; m < 3233; ++m) {
    const BigInt c = RsaApply(m, kp.e, kp.n);
    ASSERT_EQ(c, PowmOracle(m, kp.e, kp.n));
    ASSERT_EQ(RsaApply(c, kp.d, kp.n), m);
  }
}

TEST(RsaTest, ModExpMatchesRepeatedMultiplication) {
  for (unsigned long mod : {2ul, 3ul, 97ul, 1000ul, 65537ul}) {
    for (unsigned long base = 0; base < std::min(mod, 50ul); ++base) {
      unsigned long acc = 1 % mod;
      for (unsigned long e = 0; e < 40; ++e) {
        ASSERT_EQ(RsaApply(base, e, mod), acc) << base << "^" << e << " mod " << mod;
        acc = acc * base % mod;
      }
    }
  }
}

TEST(RsaTest, ModExpMatchesGmpOnLargeOperands) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(17);
  for (int t = 0; t < 50; ++t) {
    BigInt m = rng.get_z_bits(1024) | 1;
    BigInt b = rng.get_z_range(m);
    BigInt e = rng.get_z_bits(1024);
    ASSERT_EQ(RsaApply(b, e, m), PowmOracle(b, e, m));
  }
}

TEST(RsaTest, RsaApplyRejectsOutOfRange) {
  EXPECT_THROW(RsaApply(3233, 17, 3233), Error);
  EXPECT_THROW(RsaApply(-1, 17, 3233), Error);
}

TEST(RsaTest, ModInverseBruteForce) {
  for (long m = 2; m < 200; ++m) {
    for (long a = 1; a < m; ++a) {
      long want = -1;
      for (long x = 1; x < m; ++x) {
        if (a * x % m == 1) {
          want = x;
          break;
        }
      }
      if (want < 0) {
        EXPECT_THROW(ModInverse(a, m), Error);
      } else {
        ASSERT_EQ(ModInverse(a, m), want) << a << " mod " << m;
      }
    }
  }
}

TEST(RsaTest, MillerRabinMatchesTrialDivision) {
  std::mt19937_64 rng(1);
  for (unsigned long n = 0; n < 20000; ++n) {
    ASSERT_EQ(IsProbablePrime(n, 20, rng), TrialDivisionPrime(n)) << n;
  }
  for (unsigned long carmichael : {561ul, 1105ul, 1729ul, 2465ul, 2821ul, 6601ul, 8911ul,
                                   41041ul, 825265ul, 321197185ul}) {
    EXPECT_FALSE(IsProbablePrime(carmichael, 20, rng)) << carmichael;
  }
}

TEST(RsaTest, MillerRabinLargeKnownValues) {
  std::mt19937_64 rng(2);
  const BigInt m127 = (BigInt(1) << 127) - 1;  // Mersenne prime
  EXPECT_TRUE(IsProbablePrime(m127, 32, rng));
  EXPECT_FALSE(IsProbablePrime(m127 * 3, 32, rng));
  const BigInt m61 = (BigInt(1) << 61) - 1;
  EXPECT_FALSE(IsProbablePrime(m127 * m61, 32, rng));
}

void CheckKeyPair(const RsaKeyPair& kp, std::size_t bits) {
  EXPECT_EQ(BitLength(kp.n), bits);
  EXPECT_EQ(kp.p * kp.q, kp.n);
  EXPECT_NE(kp.p, kp.q);
  EXPECT_GT(mpz_probab_prime_p(kp.p.get_mpz_t(), 40), 0);
  EXPECT_GT(mpz_probab_prime_p(kp.q.get_mpz_t(), 40), 0);
  const BigInt phi = (kp.p - 1) * (kp.q - 1);
  EXPECT_EQ(BigInt(kp.d * kp.e % phi), 1);
  EXPECT_NO_THROW(kp.Validate());
}

TEST(RsaKeygenTest, GeneratedPairsSatisfyInvariants) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto kp = RsaKeygen(2048, seed);
    CheckKeyPair(kp, 2048);
    EXPECT_EQ(kp.e, 65537);
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(seed);
    for (int t = 0; t < 100; ++t) {
      const BigInt m = rng.get_z_range(kp.n);
      ASSERT_EQ(RsaApply(RsaApply(m, kp.e, kp.n), kp.d, kp.n), m);
    }
  }
}

TEST(RsaKeygenTest, SmallModuliAndDeterminism) {
  for (std::size_t bits : {32u, 64u, 128u, 512u}) CheckKeyPair(RsaKeygen(bits, 5), bits);
  EXPECT_EQ(RsaKeygen(512, 9), RsaKeygen(512, 9));
  EXPECT_NE(RsaKeygen(512, 9).n, RsaKeygen(512, 10).n);
  EXPECT_THROW(RsaKeygen(16, 1), Error);
  EXPECT_THROW(RsaKeygen(513, 1), Error);
}

TEST(RsaTest, BytesRoundTrip) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(4);
  for (int t = 0; t < 200; ++t) {
    const BigInt x = rng.get_z_bits(1 + t * 7);
    const std::size_t len = (BitLength(x) + 7) / 8 + t % 3;
    const auto bytes = BigIntToBytes(x, len);
    ASSERT_EQ(bytes.size(), len);
    ASSERT_EQ(BigIntFromBytes(bytes), x);
  }
  EXPECT_EQ(BigIntToBytes(0x0102, 3), (std::vector<std::uint8_t>{0, 1, 2}));
  EXPECT_THROW(BigIntToBytes(0x010203, 2), Error);
}

TEST(RsaKeyFileTest, RoundTrip) {
  const auto kp = RsaKeygen(512, 3);
  std::stringstream priv, pub;
  WritePrivateKey(priv, kp);
  WritePublicKey(pub, kp.public_key());
  EXPECT_EQ(ReadPrivateKey(priv), kp);
  const auto pk = ReadPublicKey(pub);
  EXPECT_EQ(pk.n, kp.n);
  EXPECT_EQ(pk.e, kp.e);
}

TEST(RsaKeyFileTest, TamperedFileRejected) {
  const auto kp = RsaKeygen(512, 3);
  std::stringstream priv;
  WritePrivateKey(priv, kp);
  std::string text = priv.str();
  const auto pos = text.find("\nd ");
  ASSERT_NE(pos, std::string::npos);
  text[pos + 4] = text[pos + 4] == '1' ? '2' : '1';
  std::istringstream in(text);
  try {
    ReadPrivateKey(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  std::istringstream garbage("not a key\n");
  EXPECT_THROW(ReadPublicKey(garbage), Error);
}

}  // namespace
}  // namespace pufhsm
