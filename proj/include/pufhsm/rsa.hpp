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

#ifndef PUFHSM_RSA_HPP_
#define PUFHSM_RSA_HPP_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace pufhsm {

using BigInt = mpz_class;

struct RsaPublicKey {
  BigInt n;
  BigInt e;
};

struct RsaPrivateKey {
  BigInt n;
  BigInt d;
};

// Textbook RSA key pair. p and q are kept so the arithmetic can be
// re-checked after loading.
struct RsaKeyPair {
  BigInt n;
  BigInt e;
  BigInt d;
  BigInt p;
  BigInt q;

  RsaPublicKey public_key() const { return {n, e}; }
  RsaPrivateKey private_key() const { return {n, d}; }
  std::size_t modulus_bits() const;

  // Throws kInvalidArgument unless n = pq, p != q, 1 < e < phi and
  // d*e = 1 mod phi.
  void Validate() const;

  friend bool operator==(const RsaKeyPair& a, const RsaKeyPair& b) {
    return a.n == b.n && a.e == b.e && a.d == b.d && a.p == b.p && a.q == b.q;
  }
};

std::size_t BitLength(const BigInt& x);

// m^exponent mod modulus by left-to-right square-and-multiply.
BigInt RsaApply(const BigInt& m, const BigInt& exponent, const BigInt& modulus);

// Extended Euclid. Throws when gcd(a, m) != 1.
BigInt ModInverse(const BigInt& a, const BigInt& m);

bool IsProbablePrime(const BigInt& n, int rounds, std::mt19937_64& rng);

RsaKeyPair RsaKeygen(std::size_t modulus_bits, std::uint64_t rng_seed);

// Key pair from fixed primes and public exponent.
RsaKeyPair RsaKeyPairFromPrimes(const BigInt& p, const BigInt& q, const BigInt& e);

BigInt BigIntFromBytes(std::span<const std::uint8_t> big_endian);
// Big-endian, left-padded with zeros to `length` bytes.
std::vector<std::uint8_t> BigIntToBytes(const BigInt& x, std::size_t length);

// Line-oriented key files:
//   pufhsm-rsa-private v1 / pufhsm-rsa-public v1, then "bits <n>" and
//   "<name> <hex>" lines for n, e (and d, p, q for private keys).
void WritePrivateKey(std::ostream& out, const RsaKeyPair& key);
void WritePublicKey(std::ostream& out, const RsaPublicKey& key);
RsaKeyPair ReadPrivateKey(std::istream& in);
RsaPublicKey ReadPublicKey(std::istream& in);

}  // namespace pufhsm

#endif  // PUFHSM_RSA_HPP_
