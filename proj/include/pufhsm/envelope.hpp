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

#ifndef PUFHSM_ENVELOPE_HPP_
#define PUFHSM_ENVELOPE_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pufhsm/aes.hpp"
#include "pufhsm/rsa.hpp"

namespace pufhsm {

inline constexpr std::string_view kEnvelopeMagic = "PUFHSM01";
inline constexpr std::string_view kWrappedKeyMagic = "PUFWKEY1";
// Version 1: payload_digest is SHA-256 of the plaintext.
inline constexpr std::uint8_t kEnvelopeVersion = 0x01;
inline constexpr std::uint8_t kCipherAes128Ctr = 0x01;

using Digest = std::array<std::uint8_t, 32>;

Digest Sha256(std::span<const std::uint8_t> data);

// Incremental SHA-256 for streamed inputs.
class Sha256Stream {
 public:
  Sha256Stream();
  ~Sha256Stream();
  Sha256Stream(const Sha256Stream&) = delete;
  Sha256Stream& operator=(const Sha256Stream&) = delete;

  void Update(std::span<const std::uint8_t> data);
  Digest Finish();

 private:
  void* ctx_;
};

// On-disk layout (big-endian): magic[8] version[1] cipher_id[1] iv[16]
// payload_len[8] payload[payload_len] payload_digest[32].
struct Envelope {
  std::uint8_t version = kEnvelopeVersion;
  std::uint8_t cipher_id = kCipherAes128Ctr;
  Iv iv;
  std::vector<std::uint8_t> payload;
  Digest payload_digest{};

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// On-disk layout: magic[8] modulus_bits[2] wrapped[ceil(modulus_bits / 8)].
struct WrappedKey {
  std::uint16_t modulus_bits = 0;
  std::vector<std::uint8_t> wrapped;

  friend bool operator==(const WrappedKey&, const WrappedKey&) = default;
};

struct SealedData {
  Envelope envelope;
  WrappedKey wrapped_key;
};

// Everything Seal draws from its seeded generator.
struct SealMaterial {
  AesKey key;
  Iv iv;
  std::array<std::uint8_t, 13> filler{};  // nonzero bytes
};

SealMaterial DrawSealMaterial(std::uint64_t rng_seed);

// 0x00.. || 0x01 || filler[13] || 0x00 || key[16], `length` bytes total.
std::vector<std::uint8_t> PadKeyBlock(const AesKey& key,
                                      const std::array<std::uint8_t, 13>& filler,
                                      std::size_t length);

WrappedKey WrapKey(const AesKey& key, const std::array<std::uint8_t, 13>& filler,
                   const RsaPublicKey& public_key);
// Throws kWrongKey when the decrypted block does not have the padding layout.
AesKey UnwrapKey(const WrappedKey& wrapped, const RsaPrivateKey& private_key);

SealedData Seal(std::span<const std::uint8_t> plaintext, const RsaPublicKey& public_key,
                std::uint64_t rng_seed);
std::vector<std::uint8_t> Unseal(const Envelope& envelope, const WrappedKey& wrapped,
                                 const RsaPrivateKey& private_key);

void WriteEnvelope(std::ostream& out, const Envelope& envelope);
Envelope ReadEnvelope(std::istream& in);
void WriteWrappedKey(std::ostream& out, const WrappedKey& wrapped);
WrappedKey ReadWrappedKey(std::istream& in);

void SaveEnvelope(const std::string& path, const Envelope& envelope);
Envelope LoadEnvelope(const std::string& path);
void SaveWrappedKey(const std::string& path, const WrappedKey& wrapped);
WrappedKey LoadWrappedKey(const std::string& path);

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace pufhsm

#endif  // PUFHSM_ENVELOPE_HPP_
