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

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "pufhsm/error.hpp"

namespace pufhsm {
namespace {

constexpr int kMillerRabinRounds = 64;

constexpr unsigned kSmallPrimes[] = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127,
    131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
    211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283,
    293, 307, 311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383,
    389, 397, 401, 409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463, 467,
    479, 487, 491, 499, 503, 509, 521, 523, 541, 547, 557, 563, 569, 571, 577,
    587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659, 661,
    673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769,
    773, 787, 797, 809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877,
    881, 883, 887, 907, 911, 919, 929, 937, 941, 947, 953, 967, 971, 977, 983,
    991, 997};

// Uniform integer in [0, bound) from the seeded stream.
BigInt RandomBelow(const BigInt& bound, std::mt19937_64& rng) {
  const std::size_t bits = BitLength(bound);
  const std::size_t bytes = (bits + 7) / 8;
  std::vector<std::uint8_t> buf(bytes);
  while (true) {
    for (std::size_t i = 0; i < bytes; i += 8) {
      std::uint64_t word = rng();
      for (std::size_t j = 0; j < 8 && i + j < bytes; ++j) {
        buf[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
      }
    }
    const std::size_t excess = bytes * 8 - bits;
    if (excess) buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
    BigInt x = BigIntFromBytes(buf);
    if (x < bound) return x;
  }
}

BigInt RandomPrime(std::size_t bits, std::mt19937_64& rng) {
  const std::size_t bytes = (bits + 7) / 8;
  std::vector<std::uint8_t> buf(bytes);
  while (true) {
    for (std::size_t i = 0; i < bytes; i += 8) {
      std::uint64_t word = rng();
      for (std::size_t j = 0; j < 8 && i + j < bytes; ++j) {
        buf[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
      }
    }
    BigInt candidate = BigIntFromBytes(buf);
    // Keep exactly `bits` bits with the top two set so that the product of
    // two such primes has exactly 2 * bits bits.
    mpz_fdiv_r_2exp(candidate.get_mpz_t(), candidate.get_mpz_t(), bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (IsProbablePrime(candidate, kMillerRabinRounds, rng)) return candidate;
  }
}

std::string ToHex(const BigInt& x) { return x.get_str(16); }

BigInt FromHex(const std::string& hex, const std::string& field) {
  BigInt x;
  if (hex.empty() || x.set_str(hex, 16) != 0) {
    Fail(ErrorCode::kFormat, "key file: field '" + field + "' is not hex");
  }
  return x;
}

std::map<std::string, std::string> ReadKeyFields(std::istream& in,
                                                 const std::string& expected_header) {
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kFormat, "key file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    Fail(ErrorCode::kFormat, "key file header must be '" + expected_header + "'");
  }
  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) Fail(ErrorCode::kFormat, "key file: malformed line");
    fields[line.substr(0, space)] = line.substr(space + 1);
  }
  return fields;
}

const std::string& Field(const std::map<std::string, std::string>& fields,
                         const std::string& name) {
  auto it = fields.find(name);
  if (it == fields.end()) Fail(ErrorCode::kFormat, "key file: missing field '" + name + "'");
  return it->second;
}

}  // namespace

std::size_t BitLength(const BigInt& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

std::size_t RsaKeyPair::modulus_bits() const { return BitLength(n); }

void RsaKeyPair::Validate() const {
  Require(p != q, "RSA primes must differ");
  Require(n == p * q, "RSA modulus is not p*q");
  const BigInt phi = (p - 1) * (q - 1);
  Require(e > 1 && e < phi, "RSA public exponent out of range");
  const BigInt check = (d * e) % phi;
  Require(check == 1, "RSA exponents are not inverse mod phi(n)");
}

BigInt RsaApply(const BigInt& m, const BigInt& exponent, const BigInt& modulus) {
  Require(modulus > 1, "RSA modulus must be > 1");
  Require(m >= 0 && m < modulus, "RSA input must satisfy 0 <= m < modulus");
  Require(exponent >= 0, "RSA exponent must be non-negative");
  BigInt result = 1;
  BigInt square = m;
  const std::size_t bits = BitLength(exponent);
  for (std::size_t i = bits; i-- > 0;) {
    result = (result * result) % modulus;
    if (mpz_tstbit(exponent.get_mpz_t(), i)) result = (result * square) % modulus;
  }
  return result % modulus;
}

BigInt ModInverse(const BigInt& a, const BigInt& m) {
  Require(m > 1, "modulus must be > 1");
  BigInt old_r = ((a % m) + m) % m, r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    const BigInt quotient = old_r / r;
    BigInt tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
  }
  Require(old_r == 1, "value has no inverse modulo m");
  return ((old_s % m) + m) % m;
}

bool IsProbablePrime(const BigInt& n, int rounds, std::mt19937_64& rng) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (unsigned sp : kSmallPrimes) {
    if (n == sp) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), sp)) return false;
  }
  const BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  std::size_t s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d /= 2;
    ++s;
  }
  const BigInt base_range = n - 3;  // bases in [2, n - 2]
  for (int round = 0; round < rounds; ++round) {
    const BigInt a = RandomBelow(base_range, rng) + 2;
    BigInt x = RsaApply(a, d, n);
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (std::size_t r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

RsaKeyPair RsaKeyPairFromPrimes(const BigInt& p, const BigInt& q, const BigInt& e) {
  Require(p > 1 && q > 1, "RSA primes must be > 1");
  Require(p != q, "RSA primes must differ");
  RsaKeyPair key;
  key.p = p;
  key.q = q;
  key.n = p * q;
  key.e = e;
  const BigInt phi = (p - 1) * (q - 1);
  Require(e > 1 && e < phi, "RSA public exponent must satisfy 1 < e < phi(n)");
  key.d = ModInverse(e, phi);
  key.Validate();
  return key;
}

RsaKeyPair RsaKeygen(std::size_t modulus_bits, std::uint64_t rng_seed) {
  Require(modulus_bits >= 32, "RSA modulus must be at least 32 bits");
  Require(modulus_bits % 2 == 0, "RSA modulus size must be even");
  std::mt19937_64 rng(rng_seed);
  const std::size_t half = modulus_bits / 2;
  while (true) {
    const BigInt p = RandomPrime(half, rng);
    BigInt q = RandomPrime(half, rng);
    while (q == p) q = RandomPrime(half, rng);
    const BigInt phi = (p - 1) * (q - 1);
    BigInt e = 65537;
    while (e < phi) {
      BigInt g;
      mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t());
      if (g == 1) break;
      e += 2;
    }
    if (e >= phi) continue;
    RsaKeyPair key = RsaKeyPairFromPrimes(p, q, e);
    if (key.modulus_bits() == modulus_bits) return key;
  }
}

BigInt BigIntFromBytes(std::span<const std::uint8_t> big_endian) {
  BigInt x;
  if (big_endian.empty()) return x;
  mpz_import(x.get_mpz_t(), big_endian.size(), 1, 1, 1, 0, big_endian.data());
  return x;
}

std::vector<std::uint8_t> BigIntToBytes(const BigInt& x, std::size_t length) {
  Require(x >= 0, "cannot encode a negative integer");
  const std::size_t needed = (BitLength(x) + 7) / 8;
  Require(needed <= length, "integer does not fit in the requested length");
  std::vector<std::uint8_t> out(length, 0);
  if (needed == 0) return out;
  std::size_t written = 0;
  mpz_export(out.data() + (length - needed), &written, 1, 1, 1, 0, x.get_mpz_t());
  return out;
}

void WritePrivateKey(std::ostream& out, const RsaKeyPair& key) {
  out << "pufhsm-rsa-private v1\n"
      << "bits " << key.modulus_bits() << '\n'
      << "n " << ToHex(key.n) << '\n'
      << "e " << ToHex(key.e) << '\n'
      << "d " << ToHex(key.d) << '\n'
      << "p " << ToHex(key.p) << '\n'
      << "q " << ToHex(key.q) << '\n';
}

void WritePublicKey(std::ostream& out, const RsaPublicKey& key) {
  out << "pufhsm-rsa-public v1\n"
      << "bits " << BitLength(key.n) << '\n'
      << "n " << ToHex(key.n) << '\n'
      << "e " << ToHex(key.e) << '\n';
}

RsaKeyPair ReadPrivateKey(std::istream& in) {
  const auto fields = ReadKeyFields(in, "pufhsm-rsa-private v1");
  RsaKeyPair key;
  key.n = FromHex(Field(fields, "n"), "n");
  key.e = FromHex(Field(fields, "e"), "e");
  key.d = FromHex(Field(fields, "d"), "d");
  key.p = FromHex(Field(fields, "p"), "p");
  key.q = FromHex(Field(fields, "q"), "q");
  try {
    key.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kFormat, std::string("key file: inconsistent key: ") + e.what());
  }
  return key;
}

RsaPublicKey ReadPublicKey(std::istream& in) {
  const auto fields = ReadKeyFields(in, "pufhsm-rsa-public v1");
  RsaPublicKey key{FromHex(Field(fields, "n"), "n"), FromHex(Field(fields, "e"), "e")};
  if (key.n <= 1 || key.e <= 1) Fail(ErrorCode::kFormat, "key file: invalid public key");
  return key;
}

}  // namespace pufhsm
