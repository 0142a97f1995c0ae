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

#include "pufhsm/envelope.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "pufhsm/error.hpp"

namespace pufhsm {
namespace {

constexpr std::size_t kPaddedKeyLength = 31;  // 0x01 + 13 filler + 0x00 + 16 key
constexpr std::size_t kMinModulusBytes = 32;
constexpr std::size_t kReadChunk = std::size_t{1} << 20;

std::size_t ModulusBytes(const BigInt& n) { return (BitLength(n) + 7) / 8; }

void ReadExact(std::istream& in, std::uint8_t* dst, std::size_t n, const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    Fail(ErrorCode::kFormat, std::string("truncated stream while reading ") + what);
  }
}

void CheckMagic(std::istream& in, std::string_view expected) {
  std::string magic(expected.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (static_cast<std::size_t>(in.gcount()) != expected.size()) {
    Fail(ErrorCode::kFormat, "stream shorter than header; expected magic " +
                                 std::string(expected));
  }
  if (magic != expected) {
    Fail(ErrorCode::kFormat, "bad magic; expected " + std::string(expected));
  }
}

void WriteBytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// SHA-256 (OpenSSL EVP)

Sha256Stream::Sha256Stream() : ctx_(EVP_MD_CTX_new()) {
  if (!ctx_ || EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr) != 1) {
    Fail(ErrorCode::kInternal, "SHA-256 initialisation failed");
  }
}

Sha256Stream::~Sha256Stream() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256Stream::Update(std::span<const std::uint8_t> data) {
  if (data.empty()) return;
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size());
}

Digest Sha256Stream::Finish() {
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len);
  return out;
}

Digest Sha256(std::span<const std::uint8_t> data) {
  Sha256Stream h;
  h.Update(data);
  return h.Finish();
}

// ---------------------------------------------------------------------------
// Key wrapping

SealMaterial DrawSealMaterial(std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  auto next_byte = [&rng]() { return static_cast<std::uint8_t>(rng() >> 56); };
  SealMaterial m;
  for (auto& b : m.key.bytes) b = next_byte();
  for (auto& b : m.iv.bytes) b = next_byte();
  for (auto& b : m.filler) {
    do {
      b = next_byte();
    } while (b == 0);
  }
  return m;
}

std::vector<std::uint8_t> PadKeyBlock(const AesKey& key,
                                      const std::array<std::uint8_t, 13>& filler,
                                      std::size_t length) {
  Require(length >= kMinModulusBytes, "modulus must be at least 32 bytes to wrap a key");
  Require(std::none_of(filler.begin(), filler.end(), [](auto b) { return b == 0; }),
          "padding filler bytes must be nonzero");
  std::vector<std::uint8_t> block(length, 0);
  std::size_t pos = length - kPaddedKeyLength;
  block[pos++] = 0x01;
  std::copy(filler.begin(), filler.end(), block.begin() + static_cast<std::ptrdiff_t>(pos));
  pos += filler.size();
  block[pos++] = 0x00;
  std::copy(key.bytes.begin(), key.bytes.end(), block.begin() + static_cast<std::ptrdiff_t>(pos));
  return block;
}

WrappedKey WrapKey(const AesKey& key, const std::array<std::uint8_t, 13>& filler,
                   const RsaPublicKey& public_key) {
  const std::size_t k = ModulusBytes(public_key.n);
  Require(k >= kMinModulusBytes, "modulus must be at least 32 bytes to wrap a key");
  Require(BitLength(public_key.n) <= 0xFFFF, "modulus too large for the key file");
  const BigInt m = BigIntFromBytes(PadKeyBlock(key, filler, k));
  const BigInt c = RsaApply(m, public_key.e, public_key.n);
  WrappedKey out;
  out.modulus_bits = static_cast<std::uint16_t>(BitLength(public_key.n));
  out.wrapped = BigIntToBytes(c, k);
  return out;
}

AesKey UnwrapKey(const WrappedKey& wrapped, const RsaPrivateKey& private_key) {
  const std::size_t k = ModulusBytes(private_key.n);
  if (wrapped.modulus_bits != BitLength(private_key.n) || wrapped.wrapped.size() != k) {
    Fail(ErrorCode::kWrongKey, "wrapped key was not produced for this private key");
  }
  const BigInt c = BigIntFromBytes(wrapped.wrapped);
  if (c >= private_key.n) {
    Fail(ErrorCode::kWrongKey, "wrapped key was not produced for this private key");
  }
  const auto block = BigIntToBytes(RsaApply(c, private_key.d, private_key.n), k);
  const std::size_t start = k - kPaddedKeyLength;
  bool ok = std::all_of(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(start),
                        [](auto b) { return b == 0; });
  ok = ok && block[start] == 0x01;
  for (std::size_t i = 1; i <= 13; ++i) ok = ok && block[start + i] != 0x00;
  ok = ok && block[start + 14] == 0x00;
  if (!ok) Fail(ErrorCode::kWrongKey, "key unwrap failed: padding layout invalid (wrong private key)");
  AesKey key;
  std::copy(block.begin() + static_cast<std::ptrdiff_t>(start + 15), block.end(),
            key.bytes.begin());
  return key;
}

// ---------------------------------------------------------------------------
// Seal / unseal

SealedData Seal(std::span<const std::uint8_t> plaintext, const RsaPublicKey& public_key,
                std::uint64_t rng_seed) {
  Require(ModulusBytes(public_key.n) >= kMinModulusBytes,
          "modulus must be at least 32 bytes to wrap a key");
  const SealMaterial material = DrawSealMaterial(rng_seed);
  SealedData out;
  out.envelope.iv = material.iv;
  out.envelope.payload = CtrTransform(material.key, material.iv, plaintext);
  out.envelope.payload_digest = Sha256(plaintext);
  out.wrapped_key = WrapKey(material.key, material.filler, public_key);
  return out;
}

std::vector<std::uint8_t> Unseal(const Envelope& envelope, const WrappedKey& wrapped,
                                 const RsaPrivateKey& private_key) {
  if (envelope.version != kEnvelopeVersion) {
    Fail(ErrorCode::kFormat, "unsupported envelope version " + std::to_string(envelope.version));
  }
  if (envelope.cipher_id != kCipherAes128Ctr) {
    Fail(ErrorCode::kFormat, "unsupported cipher id " + std::to_string(envelope.cipher_id));
  }
  const AesKey key = UnwrapKey(wrapped, private_key);
  auto plaintext = CtrTransform(key, envelope.iv, envelope.payload);
  if (Sha256(plaintext) != envelope.payload_digest) {
    Fail(ErrorCode::kCorruption, "payload digest mismatch: envelope is corrupted");
  }
  return plaintext;
}

// ---------------------------------------------------------------------------
// Codecs

void WriteEnvelope(std::ostream& out, const Envelope& envelope) {
  WriteBytes(out, kEnvelopeMagic.data(), kEnvelopeMagic.size());
  const std::uint8_t hdr[2] = {envelope.version, envelope.cipher_id};
  WriteBytes(out, hdr, 2);
  WriteBytes(out, envelope.iv.bytes.data(), envelope.iv.bytes.size());
  std::uint8_t len[8];
  const std::uint64_t n = envelope.payload.size();
  for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(n >> (56 - 8 * i));
  WriteBytes(out, len, 8);
  WriteBytes(out, envelope.payload.data(), envelope.payload.size());
  WriteBytes(out, envelope.payload_digest.data(), envelope.payload_digest.size());
  if (!out) Fail(ErrorCode::kIo, "failed to write envelope");
}

Envelope ReadEnvelope(std::istream& in) {
  CheckMagic(in, kEnvelopeMagic);
  Envelope env;
  std::uint8_t hdr[2];
  ReadExact(in, hdr, 2, "envelope header");
  env.version = hdr[0];
  env.cipher_id = hdr[1];
  if (env.version != kEnvelopeVersion) {
    Fail(ErrorCode::kFormat, "unsupported envelope version " + std::to_string(env.version));
  }
  if (env.cipher_id != kCipherAes128Ctr) {
    Fail(ErrorCode::kFormat, "unsupported cipher id " + std::to_string(env.cipher_id));
  }
  ReadExact(in, env.iv.bytes.data(), env.iv.bytes.size(), "envelope iv");
  std::uint8_t len[8];
  ReadExact(in, len, 8, "envelope payload length");
  std::uint64_t n = 0;
  for (auto b : len) n = (n << 8) | b;
  // Grow in chunks so a corrupt length cannot force a huge allocation.
  while (env.payload.size() < n) {
    const std::size_t chunk =
        static_cast<std::size_t>(std::min<std::uint64_t>(kReadChunk, n - env.payload.size()));
    const std::size_t old = env.payload.size();
    env.payload.resize(old + chunk);
    ReadExact(in, env.payload.data() + old, chunk, "envelope payload");
  }
  ReadExact(in, env.payload_digest.data(), env.payload_digest.size(), "envelope digest");
  return env;
}

void WriteWrappedKey(std::ostream& out, const WrappedKey& wrapped) {
  Require(wrapped.wrapped.size() == (wrapped.modulus_bits + 7u) / 8u,
          "wrapped key length does not match modulus size");
  WriteBytes(out, kWrappedKeyMagic.data(), kWrappedKeyMagic.size());
  const std::uint8_t bits[2] = {static_cast<std::uint8_t>(wrapped.modulus_bits >> 8),
                                static_cast<std::uint8_t>(wrapped.modulus_bits)};
  WriteBytes(out, bits, 2);
  WriteBytes(out, wrapped.wrapped.data(), wrapped.wrapped.size());
  if (!out) Fail(ErrorCode::kIo, "failed to write wrapped key");
}

WrappedKey ReadWrappedKey(std::istream& in) {
  CheckMagic(in, kWrappedKeyMagic);
  WrappedKey wk;
  std::uint8_t bits[2];
  ReadExact(in, bits, 2, "wrapped key header");
  wk.modulus_bits = static_cast<std::uint16_t>((bits[0] << 8) | bits[1]);
  if (wk.modulus_bits == 0) Fail(ErrorCode::kFormat, "wrapped key has zero modulus size");
  wk.wrapped.resize((wk.modulus_bits + 7u) / 8u);
  ReadExact(in, wk.wrapped.data(), wk.wrapped.size(), "wrapped key");
  return wk;
}

void SaveEnvelope(const std::string& path, const Envelope& envelope) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteEnvelope(out, envelope);
}

Envelope LoadEnvelope(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return ReadEnvelope(in);
}

void SaveWrappedKey(const std::string& path, const WrappedKey& wrapped) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteWrappedKey(out, wrapped);
}

WrappedKey LoadWrappedKey(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return ReadWrappedKey(in);
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  const auto size = in.tellg();
  if (size < 0) Fail(ErrorCode::kIo, "cannot size " + path);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), size);
  if (in.gcount() != size) Fail(ErrorCode::kIo, "short read on " + path);
  return data;
}

void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteBytes(out, data.data(), data.size());
  if (!out) Fail(ErrorCode::kIo, "failed to write " + path);
}

}  // namespace pufhsm
