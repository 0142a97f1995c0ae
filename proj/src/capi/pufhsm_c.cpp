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

#include "pufhsm/pufhsm.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pufhsm/bench.hpp"
#include "pufhsm/envelope.hpp"
#include "pufhsm/error.hpp"
#include "pufhsm/frame.hpp"
#include "pufhsm/hsm.hpp"
#include "pufhsm/keybits.hpp"
#include "pufhsm/puf.hpp"
#include "pufhsm/rsa.hpp"
#include "pufhsm/transport.hpp"

struct pufhsm_puf {
  std::shared_ptr<const pufhsm::PufInstance> puf;
};

struct pufhsm_rsa_key {
  std::optional<pufhsm::RsaKeyPair> pair;
  pufhsm::RsaPublicKey public_key;
};

struct pufhsm_device {
  pufhsm::DeviceState state;
};

struct pufhsm_host {
  pufhsm::HostState state;
};

struct pufhsm_listener {
  pufhsm::TcpListener listener;
};

namespace {

using pufhsm::ErrorCode;

thread_local std::string g_last_error;

pufhsm_status SetError(pufhsm_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
pufhsm_status Guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PUFHSM_OK;
  } catch (const pufhsm::Error& e) {
    return SetError(static_cast<pufhsm_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(PUFHSM_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return SetError(PUFHSM_ERR_INTERNAL, e.what());
  }
}

void NotNull(const void* p, const char* what) {
  pufhsm::Require(p != nullptr, std::string(what) + " must not be null");
}

void FillBuffer(pufhsm_buffer* out, std::span<const std::uint8_t> bytes) {
  NotNull(out, "output buffer");
  out->data = nullptr;
  out->len = 0;
  if (bytes.empty()) return;
  auto* p = static_cast<std::uint8_t*>(std::malloc(bytes.size()));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, bytes.data(), bytes.size());
  out->data = p;
  out->len = bytes.size();
}

void FillBuffer(pufhsm_buffer* out, const std::string& text) {
  FillBuffer(out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void CopyBits(const std::string& bits, char* out, std::size_t cap) {
  NotNull(out, "response buffer");
  pufhsm::Require(cap >= bits.size() + 1, "response buffer too small");
  std::memcpy(out, bits.c_str(), bits.size() + 1);
}

std::span<const std::uint8_t> Bytes(const std::uint8_t* data, std::size_t len) {
  if (len > 0) NotNull(data, "data");
  return {data, len};
}

pufhsm_indicator ToC(pufhsm::Indicator i) {
  switch (i) {
    case pufhsm::Indicator::kGreen: return PUFHSM_INDICATOR_GREEN;
    case pufhsm::Indicator::kRed: return PUFHSM_INDICATOR_RED;
    case pufhsm::Indicator::kIdle: break;
  }
  return PUFHSM_INDICATOR_IDLE;
}

std::vector<pufhsm::UserAction> ToScript(const pufhsm_action* script, std::size_t n) {
  if (n > 0) NotNull(script, "script");
  std::vector<pufhsm::UserAction> out;
  for (std::size_t i = 0; i < n; ++i) {
    switch (script[i]) {
      case PUFHSM_ACTION_ENROLL: out.push_back(pufhsm::UserAction::kEnroll); break;
      case PUFHSM_ACTION_AUTH: out.push_back(pufhsm::UserAction::kAuth); break;
      case PUFHSM_ACTION_DECRYPT: out.push_back(pufhsm::UserAction::kDecrypt); break;
      default: pufhsm::Fail(ErrorCode::kInvalidArgument, "unknown script action");
    }
  }
  return out;
}

void FillSessionResult(const pufhsm::Transcript& t, const pufhsm::HostState& host,
                       pufhsm_session_result* out) {
  using K = pufhsm::TranscriptEntry::Kind;
  NotNull(out, "session result");
  *out = pufhsm_session_result{};
  out->granted = host.auth_granted ? 1 : 0;
  out->plaintext_delivered = t.plaintext ? 1 : 0;
  out->gated = pufhsm::PlaintextGatedByAuth(t) ? 1 : 0;
  out->indicator = t.last_indicator ? ToC(*t.last_indicator) : PUFHSM_INDICATOR_IDLE;
  out->first_error = PUFHSM_OK;
  for (const auto& e : t.entries) {
    if (e.kind == K::kDenied) out->denied = 1;
    if (e.kind == K::kError && out->first_error == PUFHSM_OK) {
      out->first_error = e.error ? static_cast<pufhsm_status>(*e.error) : PUFHSM_ERR_INTERNAL;
    }
  }
  if (t.plaintext) FillBuffer(&out->plaintext, *t.plaintext);
  std::ostringstream text;
  t.Print(text);
  FillBuffer(&out->transcript, text.str());
}

pufhsm::Credentials MakeCredentials(const std::uint8_t* key, std::size_t key_len,
                                    const char* pin) {
  NotNull(pin, "pin");
  const auto bytes = Bytes(key, key_len);
  pufhsm::Require(!bytes.empty(), "key is empty");
  return pufhsm::Credentials{{bytes.begin(), bytes.end()}, pufhsm::Pin::Parse(pin)};
}

const pufhsm::RsaKeyPair& PrivatePair(const pufhsm_rsa_key* key) {
  NotNull(key, "key");
  if (!key->pair) pufhsm::Fail(ErrorCode::kInvalidArgument, "a private key is required");
  return *key->pair;
}

}  // namespace

extern "C" {

const char* pufhsm_version(void) { return "1.0.0"; }

const char* pufhsm_status_name(pufhsm_status status) {
  if (status == PUFHSM_OK) return "ok";
  return pufhsm::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char* pufhsm_last_error(void) { return g_last_error.c_str(); }

void pufhsm_buffer_free(pufhsm_buffer* buffer) {
  if (!buffer) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->len = 0;
}

// ---- PUF -----------------------------------------------------------------

pufhsm_status pufhsm_puf_new_simulated(uint64_t seed, size_t n_stages, size_t n_bits,
                                       pufhsm_puf** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new pufhsm_puf{std::make_shared<const pufhsm::PufInstance>(
        pufhsm::NewSimulatedPuf(seed, n_stages, n_bits))};
  });
}

pufhsm_status pufhsm_puf_load_table(const char* csv_path, pufhsm_puf** out) {
  return Guard([&] {
    NotNull(csv_path, "csv_path");
    NotNull(out, "out");
    *out = new pufhsm_puf{std::make_shared<const pufhsm::PufInstance>(
        pufhsm::TableBackedPuf{pufhsm::CrpTable::LoadCsv(csv_path)})};
  });
}

void pufhsm_puf_free(pufhsm_puf* puf) { delete puf; }

size_t pufhsm_puf_width(const pufhsm_puf* puf) { return puf ? puf->puf->width() : 0; }

int pufhsm_puf_is_simulated(const pufhsm_puf* puf) {
  return puf && puf->puf->is_simulated() ? 1 : 0;
}

pufhsm_status pufhsm_puf_eval(const pufhsm_puf* puf, const char* challenge, char* response,
                              size_t response_cap) {
  return Guard([&] {
    NotNull(puf, "puf");
    NotNull(challenge, "challenge");
    const auto r = puf->puf->Eval(pufhsm::Challenge::FromString(challenge));
    CopyBits(r.ToString(), response, response_cap);
  });
}

pufhsm_status pufhsm_puf_eval_noisy(const pufhsm_puf* puf, const char* challenge,
                                    double noise_sigma, uint64_t rng_seed, char* response,
                                    size_t response_cap) {
  return Guard([&] {
    NotNull(puf, "puf");
    NotNull(challenge, "challenge");
    const auto r =
        puf->puf->EvalNoisy(pufhsm::Challenge::FromString(challenge), noise_sigma, rng_seed);
    CopyBits(r.ToString(), response, response_cap);
  });
}

pufhsm_status pufhsm_puf_stats_simulated(size_t instances, size_t challenges, size_t n_stages,
                                         size_t n_bits, uint64_t seed, size_t repeats,
                                         double noise_sigma, pufhsm_puf_stats* out) {
  return Guard([&] {
    NotNull(out, "out");
    pufhsm::Require(challenges >= 1, "need at least one challenge");
    std::vector<pufhsm::PufInstance> population;
    population.reserve(instances);
    for (size_t i = 0; i < instances; ++i) {
      population.push_back(pufhsm::NewSimulatedPuf(seed + i, n_stages, n_bits));
    }
    const auto cs = pufhsm::RandomChallenges(challenges, n_bits, seed ^ 0x9e3779b97f4a7c15ULL);
    pufhsm_puf_stats stats{};
    stats.inter_instance_hd = pufhsm::InterInstanceUniqueness(population, cs);
    std::vector<pufhsm::Challenge> distinct;
    std::set<pufhsm::Challenge> seen;
    for (const auto& c : cs) {
      if (seen.insert(c).second) distinct.push_back(c);
    }
    stats.distinct_response_ratio = pufhsm::RunUniqueness(population.front(), distinct, 2).ratio;
    stats.reliability_intra_hd =
        pufhsm::Reliability(population.front(), cs, repeats, noise_sigma, seed);
    *out = stats;
  });
}

// ---- RSA -----------------------------------------------------------------

pufhsm_status pufhsm_rsa_keygen(unsigned modulus_bits, uint64_t seed, pufhsm_rsa_key** out) {
  return Guard([&] {
    NotNull(out, "out");
    auto pair = pufhsm::RsaKeygen(modulus_bits, seed);
    *out = new pufhsm_rsa_key{pair, pair.public_key()};
  });
}

pufhsm_status pufhsm_rsa_key_load(const char* path, pufhsm_rsa_key** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    std::ifstream in(path);
    if (!in) pufhsm::Fail(ErrorCode::kIo, std::string("cannot open key file ") + path);
    std::string header;
    std::getline(in, header);
    in.seekg(0);
    if (header.rfind("pufhsm-rsa-private", 0) == 0) {
      auto pair = pufhsm::ReadPrivateKey(in);
      *out = new pufhsm_rsa_key{pair, pair.public_key()};
    } else {
      *out = new pufhsm_rsa_key{std::nullopt, pufhsm::ReadPublicKey(in)};
    }
  });
}

void pufhsm_rsa_key_free(pufhsm_rsa_key* key) { delete key; }

int pufhsm_rsa_key_has_private(const pufhsm_rsa_key* key) {
  return key && key->pair ? 1 : 0;
}

unsigned pufhsm_rsa_key_bits(const pufhsm_rsa_key* key) {
  return key ? static_cast<unsigned>(pufhsm::BitLength(key->public_key.n)) : 0;
}

pufhsm_status pufhsm_rsa_key_save_private(const pufhsm_rsa_key* key, const char* path) {
  return Guard([&] {
    NotNull(path, "path");
    const auto& pair = PrivatePair(key);
    std::ofstream out(path, std::ios::trunc);
    if (!out) pufhsm::Fail(ErrorCode::kIo, std::string("cannot open ") + path);
    pufhsm::WritePrivateKey(out, pair);
    if (!out) pufhsm::Fail(ErrorCode::kIo, std::string("failed to write ") + path);
  });
}

pufhsm_status pufhsm_rsa_key_save_public(const pufhsm_rsa_key* key, const char* path) {
  return Guard([&] {
    NotNull(key, "key");
    NotNull(path, "path");
    std::ofstream out(path, std::ios::trunc);
    if (!out) pufhsm::Fail(ErrorCode::kIo, std::string("cannot open ") + path);
    pufhsm::WritePublicKey(out, key->public_key);
    if (!out) pufhsm::Fail(ErrorCode::kIo, std::string("failed to write ") + path);
  });
}

// ---- Envelope ------------------------------------------------------------

pufhsm_status pufhsm_seal(const uint8_t* data, size_t len, const pufhsm_rsa_key* public_key,
                          uint64_t seed, pufhsm_buffer* envelope_out,
                          pufhsm_buffer* wrapped_out) {
  return Guard([&] {
    NotNull(public_key, "public_key");
    const auto sealed = pufhsm::Seal(Bytes(data, len), public_key->public_key, seed);
    std::ostringstream env, wk;
    pufhsm::WriteEnvelope(env, sealed.envelope);
    pufhsm::WriteWrappedKey(wk, sealed.wrapped_key);
    FillBuffer(envelope_out, env.str());
    FillBuffer(wrapped_out, wk.str());
  });
}

pufhsm_status pufhsm_unseal(const uint8_t* envelope, size_t envelope_len, const uint8_t* wrapped,
                            size_t wrapped_len, const pufhsm_rsa_key* private_key,
                            pufhsm_buffer* plaintext_out) {
  return Guard([&] {
    const auto& pair = PrivatePair(private_key);
    const auto env_bytes = Bytes(envelope, envelope_len);
    const auto wk_bytes = Bytes(wrapped, wrapped_len);
    std::istringstream env_in(std::string(env_bytes.begin(), env_bytes.end()));
    std::istringstream wk_in(std::string(wk_bytes.begin(), wk_bytes.end()));
    const auto env = pufhsm::ReadEnvelope(env_in);
    const auto wk = pufhsm::ReadWrappedKey(wk_in);
    FillBuffer(plaintext_out, pufhsm::Unseal(env, wk, pair.private_key()));
  });
}

pufhsm_status pufhsm_seal_file(const char* in_path, const pufhsm_rsa_key* public_key,
                               uint64_t seed, const char* envelope_path,
                               const char* wrapped_path) {
  return Guard([&] {
    NotNull(in_path, "in_path");
    NotNull(public_key, "public_key");
    NotNull(envelope_path, "envelope_path");
    NotNull(wrapped_path, "wrapped_path");
    const auto data = pufhsm::ReadFileBytes(in_path);
    const auto sealed = pufhsm::Seal(data, public_key->public_key, seed);
    pufhsm::SaveEnvelope(envelope_path, sealed.envelope);
    pufhsm::SaveWrappedKey(wrapped_path, sealed.wrapped_key);
  });
}

pufhsm_status pufhsm_unseal_file(const char* envelope_path, const char* wrapped_path,
                                 const pufhsm_rsa_key* private_key, const char* out_path) {
  return Guard([&] {
    NotNull(envelope_path, "envelope_path");
    NotNull(wrapped_path, "wrapped_path");
    NotNull(out_path, "out_path");
    const auto& pair = PrivatePair(private_key);
    const auto plain = pufhsm::Unseal(pufhsm::LoadEnvelope(envelope_path),
                                      pufhsm::LoadWrappedKey(wrapped_path), pair.private_key());
    pufhsm::WriteFileBytes(out_path, plain);
  });
}

// ---- Frames --------------------------------------------------------------

uint16_t pufhsm_crc16(const uint8_t* data, size_t len) {
  if (!data && len) return 0;
  return pufhsm::Crc16CcittFalse({data, len});
}

pufhsm_status pufhsm_frame_encode(uint8_t msg_type, const uint8_t* payload, size_t len,
                                  pufhsm_buffer* out) {
  return Guard([&] { FillBuffer(out, pufhsm::EncodeFrame(msg_type, Bytes(payload, len))); });
}

pufhsm_status pufhsm_frame_decode(const uint8_t* bytes, size_t len, uint8_t* msg_type,
                                  pufhsm_buffer* payload) {
  return Guard([&] {
    NotNull(msg_type, "msg_type");
    const auto frame = pufhsm::DecodeFrame(Bytes(bytes, len));
    FillBuffer(payload, frame.payload);
    *msg_type = frame.msg_type;
  });
}

// ---- Device --------------------------------------------------------------

pufhsm_status pufhsm_device_new(const pufhsm_puf* puf, pufhsm_device** out) {
  return Guard([&] {
    NotNull(puf, "puf");
    NotNull(out, "out");
    auto* d = new pufhsm_device{};
    d->state.puf = puf->puf;
    *out = d;
  });
}

pufhsm_status pufhsm_device_load(const char* path, pufhsm_device** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new pufhsm_device{pufhsm::LoadDeviceFile(path)};
  });
}

pufhsm_status pufhsm_device_save(const pufhsm_device* device, const char* path) {
  return Guard([&] {
    NotNull(device, "device");
    NotNull(path, "path");
    pufhsm::SaveDeviceFile(path, device->state);
  });
}

void pufhsm_device_free(pufhsm_device* device) { delete device; }

size_t pufhsm_device_enrolled_count(const pufhsm_device* device) {
  return device ? device->state.enrolled.size() : 0;
}

pufhsm_indicator pufhsm_device_indicator(const pufhsm_device* device) {
  return device ? ToC(device->state.indicator) : PUFHSM_INDICATOR_IDLE;
}

pufhsm_status pufhsm_device_handle_frame(pufhsm_device* device, const uint8_t* frame,
                                         size_t len, pufhsm_buffer* reply) {
  return Guard([&] {
    NotNull(device, "device");
    const auto request = pufhsm::DecodeFrame(Bytes(frame, len));
    auto step = pufhsm::DeviceHandle(device->state, request);
    const auto wire = pufhsm::EncodeFrame(step.response.msg_type, step.response.payload);
    FillBuffer(reply, wire);
    device->state = std::move(step.state);
  });
}

namespace {

pufhsm::Frame ExchangeWithDevice(pufhsm_device* device, pufhsm::MessageType type,
                                 const pufhsm::Credentials& creds) {
  auto pipe = pufhsm::MakeInProcessPipe();
  pufhsm::SendMessage(*pipe.first, type, pufhsm::CredentialPayload(creds.key_bytes, creds.pin));
  pufhsm::DeviceEndpoint endpoint(device->state, *pipe.second);
  endpoint.Serve();
  auto reply = pufhsm::ReadFrame(*pipe.first);
  if (!reply) pufhsm::Fail(ErrorCode::kTruncated, "device did not reply");
  device->state = endpoint.state();
  return *reply;
}

void ThrowDeviceError(const pufhsm::Frame& reply) {
  const int code = reply.payload.empty() ? 0 : reply.payload[0];
  switch (static_cast<pufhsm::DeviceError>(code)) {
    case pufhsm::DeviceError::kUnknownChallenge:
      pufhsm::Fail(ErrorCode::kUnknownChallenge,
                   "device cannot evaluate the derived challenges");
    case pufhsm::DeviceError::kBadPin:
      pufhsm::Fail(ErrorCode::kInvalidArgument, "device rejected the PIN");
    default:
      pufhsm::Fail(ErrorCode::kFormat, "device reported error code " + std::to_string(code));
  }
}

}  // namespace

pufhsm_status pufhsm_device_enroll(pufhsm_device* device, const uint8_t* key, size_t key_len,
                                   const char* pin) {
  return Guard([&] {
    NotNull(device, "device");
    const auto reply =
        ExchangeWithDevice(device, pufhsm::MessageType::kEnroll, MakeCredentials(key, key_len, pin));
    if (reply.msg_type != static_cast<std::uint8_t>(pufhsm::MessageType::kAuthOk)) {
      ThrowDeviceError(reply);
    }
  });
}

pufhsm_status pufhsm_device_authenticate(pufhsm_device* device, const uint8_t* key,
                                         size_t key_len, const char* pin, int* granted) {
  return Guard([&] {
    NotNull(device, "device");
    NotNull(granted, "granted");
    const auto reply = ExchangeWithDevice(device, pufhsm::MessageType::kAuthRequest,
                                          MakeCredentials(key, key_len, pin));
    if (reply.msg_type == static_cast<std::uint8_t>(pufhsm::MessageType::kAuthOk)) {
      *granted = 1;
    } else if (reply.msg_type == static_cast<std::uint8_t>(pufhsm::MessageType::kAuthFail)) {
      *granted = 0;
    } else {
      ThrowDeviceError(reply);
    }
  });
}

// ---- Host / sessions -----------------------------------------------------

pufhsm_status pufhsm_host_load(const char* envelope_path, const char* wrapped_path,
                               const pufhsm_rsa_key* private_key, pufhsm_host** out) {
  return Guard([&] {
    NotNull(envelope_path, "envelope_path");
    NotNull(wrapped_path, "wrapped_path");
    NotNull(out, "out");
    const auto& pair = PrivatePair(private_key);
    auto* h = new pufhsm_host{};
    try {
      h->state.envelope =
          std::make_shared<const pufhsm::Envelope>(pufhsm::LoadEnvelope(envelope_path));
      h->state.wrapped =
          std::make_shared<const pufhsm::WrappedKey>(pufhsm::LoadWrappedKey(wrapped_path));
    } catch (...) {
      delete h;
      throw;
    }
    h->state.private_key = pair.private_key();
    *out = h;
  });
}

void pufhsm_host_free(pufhsm_host* host) { delete host; }

int pufhsm_host_granted(const pufhsm_host* host) {
  return host && host->state.auth_granted ? 1 : 0;
}

void pufhsm_session_result_free(pufhsm_session_result* result) {
  if (!result) return;
  pufhsm_buffer_free(&result->plaintext);
  pufhsm_buffer_free(&result->transcript);
}

pufhsm_status pufhsm_session_run(pufhsm_device* device, pufhsm_host* host, const uint8_t* key,
                                 size_t key_len, const char* pin, const pufhsm_action* script,
                                 size_t script_len, const uint8_t* drop_types,
                                 size_t drop_count, pufhsm_session_result* result) {
  return Guard([&] {
    NotNull(device, "device");
    NotNull(host, "host");
    const auto creds = MakeCredentials(key, key_len, pin);
    const auto actions = ToScript(script, script_len);
    if (drop_count) NotNull(drop_types, "drop_types");
    std::set<std::uint8_t> drops(drop_types, drop_types + drop_count);
    std::function<bool(std::uint8_t)> drop;
    if (!drops.empty()) drop = [drops](std::uint8_t t) { return drops.contains(t); };
    const auto t =
        pufhsm::RunInProcessSession(device->state, host->state, actions, creds, std::move(drop));
    FillSessionResult(t, host->state, result);
  });
}

pufhsm_status pufhsm_listener_open(const char* address, pufhsm_listener** out) {
  return Guard([&] {
    NotNull(address, "address");
    NotNull(out, "out");
    const auto [host, port] = pufhsm::ParseHostPort(address);
    *out = new pufhsm_listener{pufhsm::TcpListener::Bind(host, port)};
  });
}

uint16_t pufhsm_listener_port(const pufhsm_listener* listener) {
  return listener ? listener->listener.port() : 0;
}

void pufhsm_listener_free(pufhsm_listener* listener) { delete listener; }

pufhsm_status pufhsm_device_serve(pufhsm_device* device, pufhsm_listener* listener) {
  return Guard([&] {
    NotNull(device, "device");
    NotNull(listener, "listener");
    auto conn = listener->listener.Accept();
    pufhsm::DeviceEndpoint endpoint(device->state, conn);
    endpoint.Serve();
    device->state = endpoint.state();
  });
}

pufhsm_status pufhsm_session_run_tcp(pufhsm_host* host, const char* address, const uint8_t* key,
                                     size_t key_len, const char* pin,
                                     const pufhsm_action* script, size_t script_len,
                                     pufhsm_session_result* result) {
  return Guard([&] {
    NotNull(host, "host");
    NotNull(address, "address");
    const auto creds = MakeCredentials(key, key_len, pin);
    const auto actions = ToScript(script, script_len);
    const auto [h, port] = pufhsm::ParseHostPort(address);
    auto conn = pufhsm::ConnectTcp(h, port);
    const auto t = pufhsm::RunSession(host->state, conn, {}, actions, creds);
    conn.Close();
    FillSessionResult(t, host->state, result);
  });
}

// ---- Benchmarks ----------------------------------------------------------

pufhsm_status pufhsm_bench_timing(const uint64_t* sizes, size_t n_sizes, unsigned repeats,
                                  const pufhsm_rsa_key* key, const char* workdir,
                                  const char* csv_path, pufhsm_timing_row* rows_out) {
  return Guard([&] {
    NotNull(sizes, "sizes");
    NotNull(workdir, "workdir");
    NotNull(rows_out, "rows_out");
    const auto& pair = PrivatePair(key);
    const auto rows = pufhsm::RunTiming({sizes, n_sizes}, repeats, pair, workdir);
    if (csv_path) {
      std::ofstream out(csv_path, std::ios::trunc);
      if (!out) pufhsm::Fail(ErrorCode::kIo, std::string("cannot open ") + csv_path);
      pufhsm::WriteTimingCsv(out, rows);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      rows_out[i] = pufhsm_timing_row{r.file_size_bytes,
                                      r.process == pufhsm::Process::kEncrypt ? 0 : 1,
                                      r.real_s,
                                      r.user_s.value_or(std::nan("")),
                                      r.sys_s.value_or(std::nan("")),
                                      r.user_s && r.sys_s ? 1 : 0,
                                      r.repeats};
    }
  });
}

pufhsm_status pufhsm_bench_uniqueness(const pufhsm_puf* puf, const char* const* challenges,
                                      size_t n_challenges, unsigned experiments,
                                      const char* csv_path, pufhsm_uniqueness_result* out) {
  return Guard([&] {
    NotNull(puf, "puf");
    NotNull(out, "out");
    std::vector<pufhsm::Challenge> cs;
    if (challenges) {
      for (size_t i = 0; i < n_challenges; ++i) {
        NotNull(challenges[i], "challenge");
        cs.push_back(pufhsm::Challenge::FromString(challenges[i]));
      }
    } else {
      std::set<pufhsm::Challenge> seen;
      for (const auto& row : puf->puf->table().rows()) {
        if (seen.insert(row.challenge).second) cs.push_back(row.challenge);
      }
    }
    const auto report = pufhsm::RunUniqueness(*puf->puf, cs, experiments);
    if (csv_path) {
      std::ofstream f(csv_path, std::ios::trunc);
      if (!f) pufhsm::Fail(ErrorCode::kIo, std::string("cannot open ") + csv_path);
      report.table.WriteCsv(f);
    }
    pufhsm_uniqueness_result r{};
    r.total_trials = report.total_trials;
    for (auto d : report.distinct_per_experiment) r.distinct_total += d;
    for (auto v : report.per_row_verdicts) r.accepted += v == pufhsm::Verdict::kAccepted;
    r.ratio = report.ratio;
    *out = r;
  });
}

pufhsm_status pufhsm_bench_integrity(const char* original, const char* roundtripped,
                                     pufhsm_integrity_report* out) {
  return Guard([&] {
    NotNull(original, "original");
    NotNull(roundtripped, "roundtripped");
    NotNull(out, "out");
    const auto r = pufhsm::VerifyIntegrity(original, roundtripped);
    *out = pufhsm_integrity_report{r.size_before, r.size_after, r.byte_identical ? 1 : 0,
                                   r.digest_match ? 1 : 0};
  });
}

}  // extern "C"
