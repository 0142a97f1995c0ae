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

#include <gtest/gtest.h>

#include <deque>
#include <sstream>
#include <thread>

#include "pufhsm/error.hpp"
#include "test_util.hpp"

namespace pufhsm {
namespace {

using testing::RandomBytes;
using K = TranscriptEntry::Kind;

constexpr std::uint8_t kAuthOk = 0x10;
constexpr std::uint8_t kAuthFail = 0x11;
constexpr std::uint8_t kError = 0x7F;

Frame Request(MessageType type, std::span<const std::uint8_t> key, const std::string& pin) {
  return Frame{static_cast<std::uint8_t>(type), CredentialPayload(key, Pin::Parse(pin))};
}

DeviceState NewDevice(std::uint64_t seed = 1) {
  return DeviceState{std::make_shared<const PufInstance>(NewSimulatedPuf(seed)), {},
                     Indicator::kIdle};
}

struct Sealed {
  RsaKeyPair key;
  std::vector<std::uint8_t> plaintext;
  HostState host;
};

Sealed MakeHost(std::size_t size = 2000, std::uint64_t seed = 1) {
  Sealed s{RsaKeygen(1024, 77), RandomBytes(size, seed), {}};
  auto sealed = Seal(s.plaintext, s.key.public_key(), seed);
  s.host.envelope = std::make_shared<const Envelope>(std::move(sealed.envelope));
  s.host.wrapped = std::make_shared<const WrappedKey>(std::move(sealed.wrapped_key));
  s.host.private_key = s.key.private_key();
  return s;
}

// Independent reading of the gating invariant over the raw transcript.
bool DeliveriesFollowAuthOk(const Transcript& t) {
  std::optional<std::uint8_t> last_auth_reply;
  for (const auto& e : t.entries) {
    if (e.kind == K::kReceived && e.action == UserAction::kAuth &&
        (e.msg_type == kAuthOk || e.msg_type == kAuthFail)) {
      last_auth_reply = e.msg_type;
    }
    if (e.kind == K::kPlaintextDelivered && last_auth_reply != kAuthOk) return false;
  }
  return true;
}

bool Has(const Transcript& t, K kind, std::optional<std::uint8_t> type = std::nullopt) {
  for (const auto& e : t.entries) {
    if (e.kind == kind && (!type || e.msg_type == *type)) return true;
  }
  return false;
}

// ---- device ----------------------------------------------------------------

TEST(DeviceHandleTest, EnrollThenAuthIsGreen) {
  const auto key = RandomBytes(256, 1);
  auto s1 = DeviceHandle(NewDevice(), Request(MessageType::kEnroll, key, "1234"));
  EXPECT_EQ(s1.response.msg_type, kAuthOk);
  EXPECT_EQ(s1.state.enrolled.size(), 1u);
  EXPECT_EQ(s1.state.indicator, Indicator::kIdle);
  auto s2 = DeviceHandle(s1.state, Request(MessageType::kAuthRequest, key, "1234"));
  EXPECT_EQ(s2.response.msg_type, kAuthOk);
  EXPECT_EQ(s2.state.indicator, Indicator::kGreen);
  EXPECT_EQ(s2.state.enrolled, s1.state.enrolled);
}

TEST(DeviceHandleTest, ForeignKeyIsRed) {
  auto s1 = DeviceHandle(NewDevice(), Request(MessageType::kEnroll, RandomBytes(256, 1), "1234"));
  auto s2 = DeviceHandle(s1.state, Request(MessageType::kAuthRequest, RandomBytes(256, 2), "1234"));
  EXPECT_EQ(s2.response.msg_type, kAuthFail);
  EXPECT_EQ(s2.state.indicator, Indicator::kRed);
  auto s3 = DeviceHandle(s1.state, Request(MessageType::kAuthRequest, RandomBytes(256, 1), "1243"));
  // Same digits, same fold: the PIN order does not matter.
  EXPECT_EQ(s3.response.msg_type, kAuthOk);
  auto s4 = DeviceHandle(s1.state, Request(MessageType::kAuthRequest, RandomBytes(256, 1), "1235"));
  EXPECT_EQ(s4.response.msg_type, kAuthFail);
}

TEST(DeviceHandleTest, EnrollClearsGreen) {
  const auto key = RandomBytes(64, 1);
  auto s = DeviceHandle(NewDevice(), Request(MessageType::kEnroll, key, "1234")).state;
  s = DeviceHandle(s, Request(MessageType::kAuthRequest, key, "1234")).state;
  ASSERT_EQ(s.indicator, Indicator::kGreen);
  s = DeviceHandle(s, Request(MessageType::kEnroll, RandomBytes(64, 2), "1234")).state;
  EXPECT_EQ(s.indicator, Indicator::kIdle);
}

TEST(DeviceHandleTest, ErrorsLeaveStateUnchanged) {
  auto state = DeviceHandle(NewDevice(), Request(MessageType::kEnroll, RandomBytes(32, 1), "1234")).state;
  struct Case {
    Frame frame;
    std::uint8_t code;
  };
  const std::vector<Case> cases = {
      {Frame{0x01, {1, 2, 3}}, 0x01},                        // no separator
      {Frame{0x02, {0, '1', '2', '3', '4'}}, 0x01},          // empty key
      {Frame{0x01, {7, 0, '1', '2'}}, 0x02},                 // short PIN
      {Frame{0x02, {7, 0, '1', 'x', '3', '4'}}, 0x02},       // non-digit PIN
      {Frame{0x10, {}}, 0x03},
      {Frame{0x20, {}}, 0x03},
      {Frame{0x21, {0}}, 0x03},
      {Frame{0x7F, {1}}, 0x03},
  };
  for (const auto& c : cases) {
    const auto step = DeviceHandle(state, c.frame);
    EXPECT_EQ(step.response.msg_type, kError);
    EXPECT_EQ(step.response.payload, std::vector<std::uint8_t>{c.code});
    EXPECT_EQ(step.state.enrolled, state.enrolled);
    EXPECT_EQ(step.state.indicator, state.indicator);
  }
}

TEST(DeviceHandleTest, KeyMayContainZeroBytes) {
  std::vector<std::uint8_t> key = RandomBytes(40, 3);
  key[5] = 0;
  key[39] = 0;
  auto s = DeviceHandle(NewDevice(), Request(MessageType::kEnroll, key, "98765")).state;
  EXPECT_EQ(DeviceHandle(s, Request(MessageType::kAuthRequest, key, "98765")).response.msg_type,
            kAuthOk);
}

TEST(DeviceHandleTest, TableBackedDeviceFromFixture) {
  // A zero key with PIN 0000 derives eight all-zero challenges, which the
  // fixture knows; any other key misses the table.
  DeviceState d{std::make_shared<const PufInstance>(
                    TableBackedPuf{CrpTable::LoadCsv(PUFHSM_CRP_FIXTURE)}),
                {}, Indicator::kIdle};
  const std::vector<std::uint8_t> zeros(16, 0);
  auto s = DeviceHandle(d, Request(MessageType::kEnroll, zeros, "0000"));
  ASSERT_EQ(s.response.msg_type, kAuthOk);
  EXPECT_EQ(s.state.enrolled.begin()->ToHex(), "ffdeffdeffdeffdeffdeffdeffdeffde");
  EXPECT_EQ(DeviceHandle(s.state, Request(MessageType::kAuthRequest, zeros, "0000")).response.msg_type,
            kAuthOk);
  const auto miss = DeviceHandle(s.state, Request(MessageType::kAuthRequest, RandomBytes(16, 1), "0000"));
  EXPECT_EQ(miss.response.msg_type, kAuthFail);
  EXPECT_EQ(miss.state.indicator, Indicator::kRed);
  const auto bad_enroll = DeviceHandle(d, Request(MessageType::kEnroll, RandomBytes(16, 1), "0000"));
  EXPECT_EQ(bad_enroll.response.msg_type, kError);
  EXPECT_EQ(bad_enroll.response.payload, std::vector<std::uint8_t>{0x04});
  EXPECT_TRUE(bad_enroll.state.enrolled.empty());
}

TEST(DeviceHandleTest, BitFlipSweepOverExtendedTable) {
  // Table built from a simulated PUF over every challenge derived from the
  // base key and each single-bit variant.
  const auto sim = NewSimulatedPuf(5);
  const auto pin = Pin::Parse("2580");
  auto key = RandomBytes(64, 8);
  std::vector<std::vector<std::uint8_t>> variants{key};
  for (std::size_t j = 0; j < key.size() * 8; ++j) {
    auto v = key;
    v[j / 8] ^= static_cast<std::uint8_t>(0x80u >> (j % 8));
    variants.push_back(v);
  }
  CrpTable table;
  std::set<Challenge> seen;
  for (const auto& v : variants) {
    for (const auto& c : DeriveChallengesFromKey(v, pin).challenges) {
      if (seen.insert(c).second) table.Append({1, c, sim.Eval(c), Verdict::kRejected});
    }
  }
  const auto puf = std::make_shared<const PufInstance>(TableBackedPuf{table});
  auto state = DeviceHandle(DeviceState{puf, {}, Indicator::kIdle},
                            Request(MessageType::kEnroll, key, "2580")).state;
  const auto enrolled = *state.enrolled.begin();
  std::size_t fails = 0;
  for (std::size_t i = 1; i < variants.size(); ++i) {
    const auto token = DeriveAuthToken(*puf, DeriveChallengesFromKey(variants[i], pin));
    const auto step = DeviceHandle(state, Request(MessageType::kAuthRequest, variants[i], "2580"));
    if (token != enrolled) {
      ASSERT_EQ(step.response.msg_type, kAuthFail) << "variant " << i;
      ++fails;
    } else {
      ASSERT_EQ(step.response.msg_type, kAuthOk) << "variant " << i;
    }
  }
  EXPECT_GT(fails, variants.size() / 2);
}

TEST(DeviceHandleTest, PureAndMonotone) {
  std::mt19937_64 rng(9);
  std::vector<Frame> frames;
  std::vector<std::vector<std::uint8_t>> keys;
  for (int i = 0; i < 5; ++i) keys.push_back(RandomBytes(32, 100 + i));
  for (int i = 0; i < 200; ++i) {
    const auto& key = keys[rng() % keys.size()];
    switch (rng() % 4) {
      case 0: frames.push_back(Request(MessageType::kEnroll, key, "1111")); break;
      case 1: frames.push_back(Request(MessageType::kAuthRequest, key, "1111")); break;
      case 2: frames.push_back(Frame{0x20, {}}); break;
      default: frames.push_back(Frame{0x01, {1, 2}}); break;
    }
  }
  auto replay = [&] {
    std::vector<std::pair<std::size_t, Indicator>> trace;
    auto s = NewDevice(3);
    std::size_t prev = 0;
    for (const auto& f : frames) {
      auto step = DeviceHandle(s, f);
      EXPECT_GE(step.state.enrolled.size(), prev);
      for (const auto& t : s.enrolled) EXPECT_TRUE(step.state.enrolled.contains(t));
      if (step.state.indicator == Indicator::kGreen) {
        EXPECT_TRUE((f.msg_type == 0x02 && step.response.msg_type == kAuthOk) ||
                    (s.indicator == Indicator::kGreen && step.response.msg_type == kError));
      }
      prev = step.state.enrolled.size();
      s = std::move(step.state);
      trace.emplace_back(s.enrolled.size(), s.indicator);
    }
    return trace;
  };
  EXPECT_EQ(replay(), replay());
}

TEST(DeviceFileTest, RoundTripSimulatedAndTable) {
  auto sim = DeviceHandle(NewDevice(44), Request(MessageType::kEnroll, RandomBytes(20, 1), "1234")).state;
  sim = DeviceHandle(sim, Request(MessageType::kAuthRequest, RandomBytes(20, 1), "1234")).state;
  std::stringstream ss;
  WriteDeviceFile(ss, sim);
  const auto back = ReadDeviceFile(ss);
  EXPECT_EQ(back.enrolled, sim.enrolled);
  EXPECT_EQ(back.indicator, Indicator::kGreen);
  EXPECT_EQ(back.puf->simulated().weights, sim.puf->simulated().weights);

  DeviceState table{std::make_shared<const PufInstance>(
                        TableBackedPuf{CrpTable::LoadCsv(PUFHSM_CRP_FIXTURE)}),
                    {}, Indicator::kRed};
  std::stringstream ts;
  WriteDeviceFile(ts, table);
  const auto tback = ReadDeviceFile(ts);
  EXPECT_EQ(tback.puf->table().rows(), table.puf->table().rows());
  EXPECT_EQ(tback.indicator, Indicator::kRed);

  std::istringstream bad("pufhsm-device v2\n");
  try {
    ReadDeviceFile(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

// ---- host ------------------------------------------------------------------

TEST(HostHandleTest, GrantDenyRevoke) {
  auto s = MakeHost();
  const HostEvent decrypt{HostEventKind::kUserDecryptRequest, {}};
  const HostEvent ok{HostEventKind::kAuthFrameReceived, Frame{kAuthOk, {}}};
  const HostEvent fail{HostEventKind::kAuthFrameReceived, Frame{kAuthFail, {}}};

  auto denied = HostHandle(s.host, decrypt);
  EXPECT_TRUE(denied.denied);
  EXPECT_FALSE(denied.plaintext);
  EXPECT_FALSE(denied.state.auth_granted);

  auto granted = HostHandle(s.host, ok);
  EXPECT_TRUE(granted.state.auth_granted);
  auto out = HostHandle(granted.state, decrypt);
  ASSERT_TRUE(out.plaintext);
  EXPECT_EQ(*out.plaintext, s.plaintext);

  auto revoked = HostHandle(granted.state, fail);
  EXPECT_FALSE(revoked.state.auth_granted);
  EXPECT_TRUE(HostHandle(revoked.state, decrypt).denied);
}

TEST(HostHandleTest, UnsealErrorsKeepGrant) {
  auto s = MakeHost();
  auto state = HostHandle(s.host, {HostEventKind::kAuthFrameReceived, Frame{kAuthOk, {}}}).state;
  state.private_key = RsaKeygen(1024, 78).private_key();
  try {
    HostHandle(state, {HostEventKind::kUserDecryptRequest, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongKey);
  }
  EXPECT_TRUE(state.auth_granted);
}

// ---- sessions --------------------------------------------------------------

const std::vector<UserAction> kFull{UserAction::kEnroll, UserAction::kAuth, UserAction::kDecrypt};
const std::vector<UserAction> kAuthDecrypt{UserAction::kAuth, UserAction::kDecrypt};

TEST(SessionTest, HappyPath) {
  auto s = MakeHost();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(300, 5), Pin::Parse("1234")};
  const auto t = RunInProcessSession(device, s.host, kFull, creds);
  ASSERT_TRUE(t.plaintext);
  EXPECT_EQ(*t.plaintext, s.plaintext);
  EXPECT_EQ(t.entries.back().kind, K::kUserResult);
  EXPECT_EQ(t.entries.back().wire, EncodeFrame(0x21, std::vector<std::uint8_t>{0}));
  EXPECT_TRUE(Has(t, K::kPlaintextDelivered));
  EXPECT_EQ(t.last_indicator, Indicator::kGreen);
  EXPECT_EQ(device.indicator, Indicator::kGreen);
  EXPECT_TRUE(PlaintextGatedByAuth(t));
  EXPECT_TRUE(DeliveriesFollowAuthOk(t));
}

TEST(SessionTest, UnenrolledKeyDenied) {
  auto s = MakeHost();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(300, 5), Pin::Parse("1234")};
  const auto t = RunInProcessSession(device, s.host, kAuthDecrypt, creds);
  EXPECT_FALSE(t.plaintext);
  EXPECT_TRUE(Has(t, K::kReceived, kAuthFail));
  EXPECT_TRUE(Has(t, K::kDenied));
  EXPECT_EQ(t.entries.back().wire, EncodeFrame(0x21, std::vector<std::uint8_t>{1}));
  EXPECT_EQ(t.last_indicator, Indicator::kRed);
}

TEST(SessionTest, EnrollAckDoesNotGrant) {
  auto s = MakeHost();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(30, 5), Pin::Parse("1234")};
  const std::vector<UserAction> script{UserAction::kEnroll, UserAction::kDecrypt};
  const auto t = RunInProcessSession(device, s.host, script, creds);
  EXPECT_FALSE(t.plaintext);
  EXPECT_TRUE(Has(t, K::kDenied));
}

TEST(SessionTest, DroppedAuthOkMeansDenied) {
  auto s = MakeHost();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(300, 5), Pin::Parse("1234")};
  const auto t = RunInProcessSession(device, s.host, kFull, creds,
                                     [](std::uint8_t type) { return type == kAuthOk; });
  EXPECT_FALSE(t.plaintext);
  EXPECT_FALSE(s.host.auth_granted);
  EXPECT_TRUE(Has(t, K::kDenied));
  EXPECT_TRUE(Has(t, K::kError));
  // The device still authenticated the key.
  EXPECT_EQ(device.indicator, Indicator::kGreen);
}

TEST(SessionTest, LargeKeyIsFragmented) {
  auto s = MakeHost();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(9000, 6), Pin::Parse("123456")};
  const auto t = RunInProcessSession(device, s.host, kFull, creds);
  ASSERT_TRUE(t.plaintext);
  std::size_t sent = 0;
  for (const auto& e : t.entries) sent += e.kind == K::kSent;
  EXPECT_EQ(sent, 6u);
}

TEST(SessionTest, WrongPrivateKeyReportsFailure) {
  auto s = MakeHost();
  s.host.private_key = RsaKeygen(1024, 90).private_key();
  auto device = NewDevice();
  const Credentials creds{RandomBytes(30, 5), Pin::Parse("1234")};
  const auto t = RunInProcessSession(device, s.host, kFull, creds);
  EXPECT_FALSE(t.plaintext);
  bool wrong_key = false;
  for (const auto& e : t.entries) wrong_key |= e.kind == K::kError && e.error == ErrorCode::kWrongKey;
  EXPECT_TRUE(wrong_key);
  EXPECT_EQ(t.entries.back().wire, EncodeFrame(0x21, std::vector<std::uint8_t>{2}));
}

// Delivers only the first `keep` bytes of each device reply.
class CuttingStream : public ByteStream {
 public:
  CuttingStream(ByteStream& inner, std::size_t keep) : inner_(inner), keep_(keep) {}
  void Write(std::span<const std::uint8_t> data) override {
    inner_.Write(data.first(std::min(keep_, data.size())));
  }
  std::size_t Read(std::span<std::uint8_t> buffer) override { return inner_.Read(buffer); }

 private:
  ByteStream& inner_;
  std::size_t keep_;
};

TEST(SessionTest, ClosureMidFrameIsTruncated) {
  auto s = MakeHost();
  auto pipe = MakeInProcessPipe();
  CuttingStream cut(*pipe.second, 3);
  DeviceEndpoint endpoint(NewDevice(), cut);
  const Credentials creds{RandomBytes(30, 5), Pin::Parse("1234")};
  const auto t = RunSession(s.host, *pipe.first, [&] { endpoint.Serve(); }, kFull, creds);
  bool truncated = false;
  for (const auto& e : t.entries) truncated |= e.kind == K::kError && e.error == ErrorCode::kTruncated;
  EXPECT_TRUE(truncated);
  EXPECT_FALSE(t.plaintext);
}

// Flips one byte of every device reply.
class CorruptingStream : public ByteStream {
 public:
  explicit CorruptingStream(ByteStream& inner) : inner_(inner) {}
  void Write(std::span<const std::uint8_t> data) override {
    std::vector<std::uint8_t> copy(data.begin(), data.end());
    copy[copy.size() / 2] ^= 0x5A;
    inner_.Write(copy);
  }
  std::size_t Read(std::span<std::uint8_t> buffer) override { return inner_.Read(buffer); }

 private:
  ByteStream& inner_;
};

TEST(SessionTest, CorruptedRepliesNeverGrant) {
  auto s = MakeHost();
  auto pipe = MakeInProcessPipe();
  CorruptingStream bad(*pipe.second);
  DeviceEndpoint endpoint(NewDevice(), bad);
  const Credentials creds{RandomBytes(30, 5), Pin::Parse("1234")};
  const auto t = RunSession(s.host, *pipe.first, [&] { endpoint.Serve(); }, kFull, creds);
  EXPECT_FALSE(t.plaintext);
  EXPECT_TRUE(Has(t, K::kDenied));
  EXPECT_TRUE(PlaintextGatedByAuth(t));
}

TEST(SessionTest, GatingOverRandomFaultScripts) {
  auto s = MakeHost(500);
  std::mt19937_64 rng(12);
  const std::uint8_t droppable[] = {kAuthOk, kAuthFail, kError};
  for (int trial = 0; trial < 60; ++trial) {
    auto device = NewDevice(trial);
    auto host = s.host;
    std::vector<UserAction> script;
    for (int i = 0, n = 1 + rng() % 8; i < n; ++i) script.push_back(static_cast<UserAction>(rng() % 3));
    const std::uint8_t drop_type = droppable[rng() % 3];
    const bool drop_any = rng() % 2;
    const Credentials creds{RandomBytes(16 + rng() % 64, rng()), Pin::Parse("4444")};
    const auto t = RunInProcessSession(device, host, script, creds,
                                       [&](std::uint8_t type) { return drop_any && type == drop_type; });
    ASSERT_TRUE(PlaintextGatedByAuth(t));
    ASSERT_TRUE(DeliveriesFollowAuthOk(t));
    if (t.plaintext) {
      ASSERT_EQ(*t.plaintext, s.plaintext);
    }
  }
}

TEST(SessionTest, OverLoopbackTcp) {
  auto s = MakeHost();
  auto listener = TcpListener::Bind("127.0.0.1", 0);
  DeviceState final_state;
  std::thread device_thread([&] {
    auto conn = listener.Accept();
    DeviceEndpoint endpoint(NewDevice(), conn);
    endpoint.Serve();
    final_state = endpoint.state();
  });
  auto conn = ConnectTcp("127.0.0.1", listener.port());
  const Credentials creds{RandomBytes(300, 5), Pin::Parse("1234")};
  const auto t = RunSession(s.host, conn, {}, kFull, creds);
  conn.Close();
  device_thread.join();
  ASSERT_TRUE(t.plaintext);
  EXPECT_EQ(*t.plaintext, s.plaintext);
  EXPECT_EQ(final_state.enrolled.size(), 1u);
  EXPECT_EQ(final_state.indicator, Indicator::kGreen);
}

TEST(TranscriptTest, PrintHasNoSecrets) {
  auto s = MakeHost();
  auto device = NewDevice();
  const std::string secret = "supersecretkeymaterial";
  const Credentials creds{std::vector<std::uint8_t>(secret.begin(), secret.end()), Pin::Parse("918273")};
  const auto t = RunInProcessSession(device, s.host, kFull, creds);
  std::ostringstream out;
  t.Print(out);
  EXPECT_EQ(out.str().find(secret), std::string::npos);
  EXPECT_EQ(out.str().find("918273"), std::string::npos);
  EXPECT_NE(out.str().find("AUTH_OK"), std::string::npos);
}

}  // namespace
}  // namespace pufhsm
