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

// Drives the pufhsm executable as a user would and checks exit codes and
// output.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace {

using pufhsm::testing::RandomBytes;
using pufhsm::testing::ReadText;
using pufhsm::testing::TempDir;
using pufhsm::testing::ToHex;
using pufhsm::testing::WriteFile;
using pufhsm::testing::WriteText;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  CliRun Cli(const std::string& args, const std::string& stdin_text = "") {
    WriteText(dir_.file("stdin.txt"), stdin_text);
    const std::string cmd = std::string("'") + PUFHSM_CLI_PATH + "' " + args + " <'" +
                            dir_.file("stdin.txt") + "' >'" + dir_.file("stdout.txt") + "' 2>'" +
                            dir_.file("stderr.txt") + "'";
    CliRun r;
    const int status = std::system(cmd.c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = ReadText(dir_.file("stdout.txt"));
    r.err = ReadText(dir_.file("stderr.txt"));
    all_output_ += r.out + r.err;
    return r;
  }
  std::string F(const std::string& name) { return "'" + dir_.file(name) + "'"; }

  // Key pair, sealed 300 KiB payload, user key and PIN files.
  void Prepare() {
    ASSERT_EQ(Cli("keygen --bits 1024 --seed 4 --out " + F("k")).code, 0);
    plaintext_ = RandomBytes(300 * 1024, 21);
    WriteFile(dir_.file("plain.bin"), plaintext_);
    ASSERT_EQ(Cli("seal --in " + F("plain.bin") + " --pub " + F("k.pub") + " --out " + F("p.env") +
                  " --wrapped " + F("p.wkey") + " --seed 8")
                  .code,
              0);
    user_key_ = RandomBytes(64, 22);
    WriteFile(dir_.file("user.key"), user_key_);
    WriteText(dir_.file("pin"), pin_ + "\n");
  }
  std::string SessionArgs(const std::string& device) {
    return "session --device " + F(device) + " --puf-seed 3 --key " + F("user.key") +
           " --pin-file " + F("pin") + " --env " + F("p.env") + " --wrapped " + F("p.wkey") +
           " --priv " + F("k.priv");
  }

  TempDir dir_;
  std::string all_output_;
  std::vector<std::uint8_t> plaintext_;
  std::vector<std::uint8_t> user_key_;
  const std::string pin_ = "814207";
};

TEST_F(CliTest, KeygenIsReproducibleWithSeed) {
  ASSERT_EQ(Cli("keygen --bits 1024 --seed 77 --out " + F("a")).code, 0);
  ASSERT_EQ(Cli("keygen --bits 1024 --seed 77 --out " + F("b")).code, 0);
  ASSERT_EQ(Cli("keygen --bits 1024 --seed 78 --out " + F("c")).code, 0);
  EXPECT_EQ(ReadText(dir_.file("a.priv")), ReadText(dir_.file("b.priv")));
  EXPECT_EQ(ReadText(dir_.file("a.pub")), ReadText(dir_.file("b.pub")));
  EXPECT_NE(ReadText(dir_.file("a.priv")), ReadText(dir_.file("c.priv")));
}

TEST_F(CliTest, SealSessionRoundTrip) {
  Prepare();
  auto r = Cli(SessionArgs("dev") + " --enroll --auth --decrypt --out " + F("out.bin"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("GREEN"), std::string::npos);
  EXPECT_EQ(ReadText(dir_.file("out.bin")), ReadText(dir_.file("plain.bin")));
  r = Cli("bench-integrity " + F("plain.bin") + " " + F("out.bin"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("byte-identical yes"), std::string::npos);

  // Device state persists: a later run authenticates without enrolling.
  r = Cli(SessionArgs("dev") + " --auth --decrypt --out " + F("out2.bin"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadText(dir_.file("out2.bin")), ReadText(dir_.file("plain.bin")));

  r = Cli("unseal --env " + F("p.env") + " --wrapped " + F("p.wkey") + " --priv " + F("k.priv") +
          " --out " + F("out3.bin"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(ReadText(dir_.file("out3.bin")), ReadText(dir_.file("plain.bin")));
}

TEST_F(CliTest, EnrollAuthCommands) {
  Prepare();
  const std::string cred = " --key " + F("user.key") + " --pin-file " + F("pin");
  auto r = Cli("auth --device " + F("d") + " --puf-seed 5" + cred);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("RED"), std::string::npos);
  EXPECT_NE(r.err.find("authentication failed"), std::string::npos);
  ASSERT_EQ(Cli("enroll --device " + F("d") + " --puf-seed 5" + cred).code, 0);
  r = Cli("auth --device " + F("d") + cred);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("GREEN"), std::string::npos);

  // PIN from a non-terminal stdin.
  r = Cli("auth --device " + F("d") + " --key " + F("user.key"), pin_ + "\n");
  EXPECT_EQ(r.code, 0) << r.err;
  r = Cli("auth --device " + F("d") + " --key " + F("user.key"), "000000\n");
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, UnenrolledSessionIsDenied) {
  Prepare();
  auto r = Cli(SessionArgs("dev") + " --auth --decrypt --out " + F("out.bin"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("RED"), std::string::npos);
  EXPECT_NE(r.err.find("authentication failed"), std::string::npos);
  EXPECT_EQ(ReadText(dir_.file("out.bin")), "");

  r = Cli(SessionArgs("dev2") + " --decrypt --out " + F("out.bin"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("decryption denied"), std::string::npos);
}

TEST_F(CliTest, TcpSession) {
  Prepare();
  auto r = Cli(SessionArgs("dev") + " --enroll --auth --decrypt --tcp 127.0.0.1:0 --out " +
               F("out.bin"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadText(dir_.file("out.bin")), ReadText(dir_.file("plain.bin")));
  // The child saved the enrollment.
  r = Cli(SessionArgs("dev") + " --auth --decrypt --out " + F("out2.bin"));
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
  EXPECT_EQ(Cli("keygen").code, 2);
  EXPECT_EQ(Cli("keygen --bits banana --out " + F("x")).code, 2);
  EXPECT_EQ(Cli("seal --in " + F("nope") + " --pub a --out b --wrapped c").code, 2);
  EXPECT_EQ(Cli("puf-stats --instances 1").code, 2);
  EXPECT_EQ(Cli("--help").code, 0);
}

TEST_F(CliTest, DecryptionFailuresAreDistinct) {
  Prepare();
  ASSERT_EQ(Cli("keygen --bits 1024 --seed 5 --out " + F("other")).code, 0);
  const std::string tail = " --out " + F("o.bin");
  auto r = Cli("unseal --env " + F("p.env") + " --wrapped " + F("p.wkey") + " --priv " +
               F("other.priv") + tail);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("wrong key"), std::string::npos) << r.err;

  const std::string text = ReadText(dir_.file("p.env"));
  std::vector<std::uint8_t> env(text.begin(), text.end());
  env[1000] ^= 0x01;
  WriteFile(dir_.file("bad.env"), env);
  r = Cli("unseal --env " + F("bad.env") + " --wrapped " + F("p.wkey") + " --priv " +
          F("k.priv") + tail);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("corruption"), std::string::npos) << r.err;

  WriteText(dir_.file("junk.env"), "definitely not an envelope");
  r = Cli("unseal --env " + F("junk.env") + " --wrapped " + F("p.wkey") + " --priv " +
          F("k.priv") + tail);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("format"), std::string::npos) << r.err;
}

TEST_F(CliTest, BenchCommands) {
  auto r = Cli(std::string("bench-uniq --table '") + PUFHSM_CRP_FIXTURE + "' --out " + F("u.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("16/22"), std::string::npos);
  EXPECT_NE(r.out.find("(72%)"), std::string::npos);

  ASSERT_EQ(Cli("keygen --bits 1024 --seed 1 --out " + F("k")).code, 0);
  r = Cli("bench-time --sizes 4K,64K --repeats 2 --priv " + F("k.priv") + " --workdir '" +
          dir_.path().string() + "' --out " + F("t.csv"));
  ASSERT_EQ(r.code == 0 || r.code == 1, true) << r.err;
  EXPECT_NE(r.out.find("Encrypt"), std::string::npos);
  EXPECT_NE(ReadText(dir_.file("t.csv")).find("file_size,process"), std::string::npos);

  r = Cli("puf-stats --instances 10 --challenges 200");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("inter-instance"), std::string::npos);

  WriteText(dir_.file("a"), "abc");
  WriteText(dir_.file("b"), "abd");
  r = Cli("bench-integrity " + F("a") + " " + F("b"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("byte-identical no"), std::string::npos);
}

TEST_F(CliTest, SecretsNeverPrinted) {
  Prepare();
  Cli(SessionArgs("dev") + " --enroll --auth --decrypt --transcript --out " + F("out.bin"));
  Cli(SessionArgs("dev") + " --auth --decrypt --transcript --out " + F("out.bin"));
  Cli("auth --device " + F("dev") + " --key " + F("user.key"), pin_ + "\n");
  ASSERT_FALSE(all_output_.empty());
  EXPECT_EQ(all_output_.find(pin_), std::string::npos);
  const std::string raw_key(user_key_.begin(), user_key_.end());
  EXPECT_EQ(all_output_.find(raw_key.substr(0, 16)), std::string::npos);
  EXPECT_EQ(all_output_.find(ToHex(user_key_).substr(0, 16)), std::string::npos);
  // No fragment of the private key file shows up either.
  const std::string priv = ReadText(dir_.file("k.priv"));
  for (std::size_t pos = priv.find('\n'); pos != std::string::npos && pos + 33 < priv.size();
       pos = priv.find('\n', pos + 1)) {
    const std::string line = priv.substr(pos + 1, 32);
    if (line.size() == 32) {
      EXPECT_EQ(all_output_.find(line), std::string::npos);
    }
  }
  const std::string plain(plaintext_.begin(), plaintext_.end());
  EXPECT_EQ(all_output_.find(plain.substr(0, 32)), std::string::npos);
}

}  // namespace
