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

#include "pufhsm/hsm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pufhsm {
namespace {

Frame MakeFrame(MessageType type, std::vector<std::uint8_t> payload = {}) {
  return Frame{static_cast<std::uint8_t>(type), std::move(payload)};
}

Frame ErrorFrame(DeviceError code) {
  return MakeFrame(MessageType::kError, {static_cast<std::uint8_t>(code)});
}

struct ParsedCredentials {
  std::span<const std::uint8_t> key;
  std::optional<Pin> pin;
  std::optional<DeviceError> error;
};

ParsedCredentials ParseCredentials(const std::vector<std::uint8_t>& payload) {
  ParsedCredentials out;
  const auto sep = std::find(payload.rbegin(), payload.rend(), std::uint8_t{0});
  if (sep == payload.rend()) {
    out.error = DeviceError::kMalformedPayload;
    return out;
  }
  const std::size_t sep_index = static_cast<std::size_t>(payload.rend() - sep) - 1;
  if (sep_index == 0) {
    out.error = DeviceError::kMalformedPayload;  // empty key
    return out;
  }
  out.key = std::span(payload).first(sep_index);
  const std::string digits(payload.begin() + static_cast<std::ptrdiff_t>(sep_index) + 1,
                           payload.end());
  try {
    out.pin = Pin::Parse(digits);
  } catch (const Error&) {
    out.error = DeviceError::kBadPin;
  }
  return out;
}

}  // namespace

const char* IndicatorName(Indicator indicator) {
  switch (indicator) {
    case Indicator::kIdle: return "IDLE";
    case Indicator::kGreen: return "GREEN";
    case Indicator::kRed: return "RED";
  }
  return "?";
}

std::vector<std::uint8_t> CredentialPayload(std::span<const std::uint8_t> key_bytes,
                                            const Pin& pin) {
  Require(!key_bytes.empty(), "key is empty");
  std::vector<std::uint8_t> out(key_bytes.begin(), key_bytes.end());
  out.push_back(0x00);
  out.insert(out.end(), pin.digits().begin(), pin.digits().end());
  return out;
}

DeviceStep DeviceHandle(const DeviceState& state, const Frame& request) {
  Require(state.puf != nullptr, "device has no PUF");
  DeviceStep step{state, {}};
  const auto type = static_cast<MessageType>(request.msg_type);
  if (type != MessageType::kEnroll && type != MessageType::kAuthRequest) {
    step.response = ErrorFrame(DeviceError::kUnexpectedType);
    return step;
  }
  const auto creds = ParseCredentials(request.payload);
  if (creds.error) {
    step.response = ErrorFrame(*creds.error);
    return step;
  }
  std::optional<AuthToken> token;
  try {
    token = DeriveAuthToken(*state.puf, DeriveChallengesFromKey(creds.key, *creds.pin));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnknownChallenge) throw;
  }

  if (type == MessageType::kEnroll) {
    if (!token) {
      step.response = ErrorFrame(DeviceError::kUnknownChallenge);
      return step;
    }
    step.state.enrolled.insert(*token);
    step.state.indicator = Indicator::kIdle;
    step.response = MakeFrame(MessageType::kAuthOk);
    return step;
  }

  // A table miss means the key maps outside the registered responses.
  if (token && state.enrolled.contains(*token)) {
    step.state.indicator = Indicator::kGreen;
    step.response = MakeFrame(MessageType::kAuthOk);
  } else {
    step.state.indicator = Indicator::kRed;
    step.response = MakeFrame(MessageType::kAuthFail);
  }
  return step;
}

void DeviceEndpoint::Serve() {
  while (true) {
    std::optional<Frame> fragment;
    try {
      fragment = ReadFrame(link_);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kTruncated) return;
      SendMessage(link_, MessageType::kError,
                  std::vector<std::uint8_t>{static_cast<std::uint8_t>(DeviceError::kFrameError)});
      continue;
    }
    if (!fragment) return;
    std::optional<Frame> message;
    try {
      message = assembler_.Push(*fragment);
    } catch (const Error&) {
      SendMessage(link_, MessageType::kError,
                  std::vector<std::uint8_t>{static_cast<std::uint8_t>(DeviceError::kFrameError)});
      continue;
    }
    if (!message) continue;
    DeviceStep step = DeviceHandle(state_, *message);
    state_ = std::move(step.state);
    SendMessage(link_, static_cast<MessageType>(step.response.msg_type), step.response.payload);
  }
}

// ---------------------------------------------------------------------------
// Device file

void WriteDeviceFile(std::ostream& out, const DeviceState& state) {
  Require(state.puf != nullptr, "device has no PUF");
  out << "pufhsm-device v1\n";
  if (state.puf->is_simulated()) {
    const auto& sim = state.puf->simulated();
    out << "puf simulated " << sim.seed << ' ' << sim.n_stages << ' ' << sim.n_bits << '\n';
  } else {
    out << "puf table\n";
    for (const auto& r : state.puf->table().rows()) {
      out << "crp " << r.experiment_id << ',' << r.challenge.ToString() << ','
          << r.response.ToString() << ',' << (r.verdict == Verdict::kAccepted ? 'V' : 'x')
          << '\n';
    }
  }
  std::string indicator = IndicatorName(state.indicator);
  std::transform(indicator.begin(), indicator.end(), indicator.begin(), ::tolower);
  out << "indicator " << indicator << '\n';
  for (const auto& t : state.enrolled) out << "token " << t.ToHex() << '\n';
}

DeviceState ReadDeviceFile(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "pufhsm-device v1") {
    Fail(ErrorCode::kFormat, "device file must start with 'pufhsm-device v1'");
  }
  DeviceState state;
  bool table_mode = false;
  std::ostringstream csv;
  csv << "experiment,challenge,response,verdict\n";
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "puf") {
        std::string kind;
        ls >> kind;
        if (kind == "simulated") {
          std::uint64_t seed = 0;
          std::size_t stages = 0, bits = 0;
          if (!(ls >> seed >> stages >> bits)) Fail(ErrorCode::kFormat, "bad puf line");
          state.puf = std::make_shared<const PufInstance>(NewSimulatedPuf(seed, stages, bits));
        } else if (kind == "table") {
          table_mode = true;
        } else {
          Fail(ErrorCode::kFormat, "unknown puf kind '" + kind + "'");
        }
      } else if (tag == "crp") {
        std::string row;
        ls >> row;
        csv << row << '\n';
      } else if (tag == "indicator") {
        std::string v;
        ls >> v;
        if (v == "idle") state.indicator = Indicator::kIdle;
        else if (v == "green") state.indicator = Indicator::kGreen;
        else if (v == "red") state.indicator = Indicator::kRed;
        else Fail(ErrorCode::kFormat, "bad indicator '" + v + "'");
      } else if (tag == "token") {
        std::string hex;
        ls >> hex;
        state.enrolled.insert(AuthToken::FromHex(hex));
      } else {
        Fail(ErrorCode::kFormat, "unknown device file line '" + tag + "'");
      }
    }
    if (table_mode) {
      std::istringstream csv_in(csv.str());
      state.puf = std::make_shared<const PufInstance>(TableBackedPuf{CrpTable::ReadCsv(csv_in)});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    Fail(ErrorCode::kFormat, std::string("device file: ") + e.what());
  }
  if (!state.puf) Fail(ErrorCode::kFormat, "device file has no puf line");
  return state;
}

void SaveDeviceFile(const std::string& path, const DeviceState& state) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteDeviceFile(out, state);
  if (!out) Fail(ErrorCode::kIo, "failed to write " + path);
}

DeviceState LoadDeviceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open device file " + path);
  return ReadDeviceFile(in);
}

// ---------------------------------------------------------------------------
// Host

HostStep HostHandle(const HostState& state, const HostEvent& event) {
  HostStep step{state, std::nullopt, false};
  switch (event.kind) {
    case HostEventKind::kAuthFrameReceived:
      if (event.frame.msg_type == static_cast<std::uint8_t>(MessageType::kAuthOk)) {
        step.state.auth_granted = true;
      } else if (event.frame.msg_type == static_cast<std::uint8_t>(MessageType::kAuthFail)) {
        step.state.auth_granted = false;
      }
      return step;
    case HostEventKind::kUserDecryptRequest:
      if (!state.auth_granted) {
        step.denied = true;
        return step;
      }
      Require(state.envelope && state.wrapped, "host has no sealed data loaded");
      step.plaintext = Unseal(*state.envelope, *state.wrapped, state.private_key);
      return step;
  }
  return step;
}

// ---------------------------------------------------------------------------
// Session

const char* UserActionName(UserAction action) {
  switch (action) {
    case UserAction::kEnroll: return "enroll";
    case UserAction::kAuth: return "auth";
    case UserAction::kDecrypt: return "decrypt";
  }
  return "?";
}

const char* TranscriptKindName(TranscriptEntry::Kind kind) {
  using K = TranscriptEntry::Kind;
  switch (kind) {
    case K::kSent: return "sent";
    case K::kReceived: return "received";
    case K::kUserRequest: return "user-request";
    case K::kUserResult: return "user-result";
    case K::kGranted: return "granted";
    case K::kRevoked: return "revoked";
    case K::kPlaintextDelivered: return "plaintext-delivered";
    case K::kDenied: return "denied";
    case K::kError: return "error";
  }
  return "?";
}

void Transcript::Print(std::ostream& out) const {
  for (const auto& e : entries) {
    out << UserActionName(e.action) << ' ' << TranscriptKindName(e.kind);
    if (e.kind == TranscriptEntry::Kind::kSent || e.kind == TranscriptEntry::Kind::kReceived ||
        e.kind == TranscriptEntry::Kind::kUserRequest ||
        e.kind == TranscriptEntry::Kind::kUserResult) {
      out << ' ' << MessageTypeName(e.msg_type) << " (" << e.wire.size() << " bytes)";
    }
    if (e.error) out << " [" << ErrorCodeName(*e.error) << ']';
    if (!e.detail.empty()) out << ": " << e.detail;
    out << '\n';
  }
}

Transcript RunSession(HostState& host, ByteStream& link, const std::function<void()>& pump,
                      std::span<const UserAction> script, const Credentials& credentials) {
  using K = TranscriptEntry::Kind;
  Transcript t;
  const auto payload = CredentialPayload(credentials.key_bytes, credentials.pin);

  auto record = [&t](K kind, UserAction action, std::uint8_t type = 0,
                     std::vector<std::uint8_t> wire = {}, std::string detail = {},
                     std::optional<ErrorCode> error = std::nullopt) {
    TranscriptEntry e{kind, type, action, error, std::move(wire), std::move(detail)};
    t.entries.push_back(std::move(e));
  };

  for (const UserAction action : script) {
    if (action == UserAction::kDecrypt) {
      const auto request = EncodeFrame(static_cast<std::uint8_t>(MessageType::kDecryptRequest), {});
      record(K::kUserRequest, action, request[1], request);
      DecryptStatus status = DecryptStatus::kDenied;
      try {
        HostStep step = HostHandle(host, {HostEventKind::kUserDecryptRequest, {}});
        host = std::move(step.state);
        if (step.plaintext) {
          status = DecryptStatus::kDelivered;
          record(K::kPlaintextDelivered, action, 0, {},
                 std::to_string(step.plaintext->size()) + " bytes");
          t.plaintext = std::move(step.plaintext);
        } else {
          record(K::kDenied, action, 0, {}, "decryption denied: not authenticated");
        }
      } catch (const Error& e) {
        status = DecryptStatus::kFailed;
        record(K::kError, action, 0, {}, e.what(), e.code());
      }
      const std::vector<std::uint8_t> result{static_cast<std::uint8_t>(status)};
      const auto frame = EncodeFrame(static_cast<std::uint8_t>(MessageType::kDecryptResult), result);
      record(K::kUserResult, action, frame[1], frame);
      continue;
    }

    const MessageType type =
        action == UserAction::kEnroll ? MessageType::kEnroll : MessageType::kAuthRequest;
    for (auto& frame : EncodeMessage(type, payload)) {
      link.Write(frame);
      const std::uint8_t wire_type = frame[1];
      record(K::kSent, action, wire_type, std::move(frame));
    }
    if (pump) pump();

    std::optional<Frame> reply;
    try {
      MessageAssembler assembler;
      while (true) {
        auto fragment = ReadFrame(link);
        if (!fragment) break;
        const auto wire = EncodeFrame(fragment->msg_type, fragment->payload);
        record(K::kReceived, action, fragment->msg_type, wire);
        reply = assembler.Push(*fragment);
        if (reply) break;
      }
      if (!reply) {
        record(K::kError, action, 0, {}, "no reply from device", ErrorCode::kTruncated);
        continue;
      }
    } catch (const Error& e) {
      record(K::kError, action, 0, {}, e.what(), e.code());
      continue;
    }

    if (action == UserAction::kEnroll) {
      if (reply->msg_type != static_cast<std::uint8_t>(MessageType::kAuthOk)) {
        record(K::kError, action, reply->msg_type, {}, "enrollment rejected by device");
      }
      continue;
    }
    if (reply->msg_type == static_cast<std::uint8_t>(MessageType::kAuthOk)) {
      t.last_indicator = Indicator::kGreen;
    } else if (reply->msg_type == static_cast<std::uint8_t>(MessageType::kAuthFail)) {
      t.last_indicator = Indicator::kRed;
    }
    const bool before = host.auth_granted;
    host = HostHandle(host, {HostEventKind::kAuthFrameReceived, *reply}).state;
    if (!before && host.auth_granted) record(K::kGranted, action);
    if (before && !host.auth_granted) record(K::kRevoked, action);
  }
  return t;
}

Transcript RunInProcessSession(DeviceState& device, HostState& host,
                               std::span<const UserAction> script,
                               const Credentials& credentials,
                               std::function<bool(std::uint8_t)> drop) {
  auto pipe = MakeInProcessPipe();
  FrameDroppingStream device_side(*pipe.second, std::move(drop));
  DeviceEndpoint endpoint(device, device_side);
  Transcript t = RunSession(host, *pipe.first, [&endpoint] { endpoint.Serve(); }, script,
                            credentials);
  device = endpoint.state();
  return t;
}

bool PlaintextGatedByAuth(const Transcript& transcript) {
  using K = TranscriptEntry::Kind;
  // Only replies to AUTH_REQUEST count; enrollment acknowledgements never grant.
  bool granted = false;
  for (const auto& e : transcript.entries) {
    if (e.kind == K::kReceived && e.action == UserAction::kAuth) {
      if (e.msg_type == static_cast<std::uint8_t>(MessageType::kAuthOk)) granted = true;
      if (e.msg_type == static_cast<std::uint8_t>(MessageType::kAuthFail)) granted = false;
    }
    if (e.kind == K::kPlaintextDelivered && !granted) return false;
  }
  return true;
}

}  // namespace pufhsm
