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

#ifndef PUFHSM_HSM_HPP_
#define PUFHSM_HSM_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pufhsm/envelope.hpp"
#include "pufhsm/error.hpp"
#include "pufhsm/frame.hpp"
#include "pufhsm/keybits.hpp"
#include "pufhsm/puf.hpp"
#include "pufhsm/transport.hpp"

namespace pufhsm {

// ---------------------------------------------------------------------------
// Device (the authenticator)

enum class Indicator { kIdle, kGreen, kRed };
const char* IndicatorName(Indicator indicator);

// Code byte carried by ERROR frames.
enum class DeviceError : std::uint8_t {
  kMalformedPayload = 0x01,
  kBadPin = 0x02,
  kUnexpectedType = 0x03,
  kUnknownChallenge = 0x04,
  kFrameError = 0x05,
};

struct DeviceState {
  std::shared_ptr<const PufInstance> puf;
  std::set<AuthToken> enrolled;
  Indicator indicator = Indicator::kIdle;
};

struct DeviceStep {
  DeviceState state;
  Frame response;
};

// key bytes || 0x00 || PIN digits. The device splits on the last zero byte,
// so binary keys may contain zeros.
std::vector<std::uint8_t> CredentialPayload(std::span<const std::uint8_t> key_bytes,
                                            const Pin& pin);

// Pure transition: (state, request) fully determines the result.
DeviceStep DeviceHandle(const DeviceState& state, const Frame& request);

// Serves frames arriving on a stream, reassembling fragments.
class DeviceEndpoint {
 public:
  DeviceEndpoint(DeviceState state, ByteStream& link)
      : state_(std::move(state)), link_(link) {}

  // Handles frames until the stream reports no more bytes. On an in-process
  // pipe that means "nothing buffered"; on a socket it means the peer closed.
  void Serve();

  const DeviceState& state() const { return state_; }

 private:
  DeviceState state_;
  ByteStream& link_;
  MessageAssembler assembler_;
};

// Text device file: "pufhsm-device v1", then either
// "puf simulated <seed> <stages> <bits>" or "puf table" followed by
// "crp <experiment>,<challenge>,<response>,<verdict>" rows, then
// "indicator <idle|green|red>" and one "token <hex>" line per enrolled token.
void WriteDeviceFile(std::ostream& out, const DeviceState& state);
DeviceState ReadDeviceFile(std::istream& in);
void SaveDeviceFile(const std::string& path, const DeviceState& state);
DeviceState LoadDeviceFile(const std::string& path);

// ---------------------------------------------------------------------------
// Host (holds the sealed data and the private key)

struct HostState {
  std::shared_ptr<const Envelope> envelope;
  std::shared_ptr<const WrappedKey> wrapped;
  RsaPrivateKey private_key;
  bool auth_granted = false;
};

enum class HostEventKind { kAuthFrameReceived, kUserDecryptRequest };

struct HostEvent {
  HostEventKind kind;
  Frame frame;  // kAuthFrameReceived only
};

struct HostStep {
  HostState state;
  std::optional<std::vector<std::uint8_t>> plaintext;
  bool denied = false;
};

// Unseal errors propagate as exceptions; the caller's state is untouched.
HostStep HostHandle(const HostState& state, const HostEvent& event);

// ---------------------------------------------------------------------------
// Session orchestration

enum class UserAction { kEnroll, kAuth, kDecrypt };
const char* UserActionName(UserAction action);

struct Credentials {
  std::vector<std::uint8_t> key_bytes;
  Pin pin;
};

// DECRYPT_RESULT status byte.
enum class DecryptStatus : std::uint8_t { kDelivered = 0x00, kDenied = 0x01, kFailed = 0x02 };

struct TranscriptEntry {
  enum class Kind {
    kSent,               // host -> device frame
    kReceived,           // device -> host frame
    kUserRequest,        // user -> host DECRYPT_REQUEST
    kUserResult,         // host -> user DECRYPT_RESULT
    kGranted,            // host auth_granted became true
    kRevoked,            // host auth_granted became false
    kPlaintextDelivered,
    kDenied,
    kError,
  };
  Kind kind;
  std::uint8_t msg_type = 0;
  UserAction action = UserAction::kEnroll;
  std::optional<ErrorCode> error;
  std::vector<std::uint8_t> wire;  // encoded frame bytes where applicable
  std::string detail;
};

const char* TranscriptKindName(TranscriptEntry::Kind kind);

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::optional<std::vector<std::uint8_t>> plaintext;
  std::optional<Indicator> last_indicator;

  void Print(std::ostream& out) const;
};

// Drives the script from the host side of `link`. `pump` is called after
// each request so a cooperatively stepped device can answer; pass an empty
// function when the device runs elsewhere.
Transcript RunSession(HostState& host, ByteStream& link, const std::function<void()>& pump,
                      std::span<const UserAction> script, const Credentials& credentials);

// Device and host stepped in one thread over an in-process pipe. Frames the
// device sends whose msg_type satisfies `drop` are lost in transit.
Transcript RunInProcessSession(DeviceState& device, HostState& host,
                               std::span<const UserAction> script,
                               const Credentials& credentials,
                               std::function<bool(std::uint8_t)> drop = {});

// Every plaintext delivery follows an AUTH_OK reply to an AUTH_REQUEST with
// no AUTH_FAIL reply in between. Judged from received frames only.
bool PlaintextGatedByAuth(const Transcript& transcript);

}  // namespace pufhsm

#endif  // PUFHSM_HSM_HPP_
