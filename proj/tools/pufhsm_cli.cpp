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

// pufhsm: command-line front end over the libpufhsm C API.

#include <sys/wait.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pufhsm/pufhsm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// Thrown for failures that should end the process with a specific exit code.
struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void Usage(const std::string& message) { throw ExitError{kExitUsage, message}; }

[[noreturn]] void Domain(const std::string& message) { throw ExitError{kExitDomain, message}; }

void Check(pufhsm_status status, const std::string& context) {
  if (status == PUFHSM_OK) return;
  std::string message = context + ": " + pufhsm_status_name(status);
  const std::string detail = pufhsm_last_error();
  if (!detail.empty()) message += " (" + detail + ")";
  if (status == PUFHSM_ERR_INVALID_ARGUMENT) Usage(message);
  Domain(message);
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(p); }
  T* get() const { return p; }
  T** out() { return &p; }
};

using PufPtr = Owned<pufhsm_puf, pufhsm_puf_free>;
using KeyPtr = Owned<pufhsm_rsa_key, pufhsm_rsa_key_free>;
using DevicePtr = Owned<pufhsm_device, pufhsm_device_free>;
using HostPtr = Owned<pufhsm_host, pufhsm_host_free>;
using ListenerPtr = Owned<pufhsm_listener, pufhsm_listener_free>;

struct SessionResult {
  pufhsm_session_result r{};
  ~SessionResult() { pufhsm_session_result_free(&r); }
};

std::uint64_t RandomSeed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::uint8_t> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Domain("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBytes(const std::string& path, const std::uint8_t* data, std::size_t len) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Domain("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
  if (!out) Domain("failed to write " + path);
}

std::string Trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// Reads the PIN from a file, or prompts on the terminal with echo disabled.
// A non-terminal stdin is read as one line so scripted runs keep working.
std::string ReadPin(const std::string& pin_file) {
  std::string pin;
  if (!pin_file.empty()) {
    std::ifstream in(pin_file);
    if (!in) Usage("cannot open PIN file " + pin_file);
    std::getline(in, pin);
    return Trim(pin);
  }
  if (isatty(STDIN_FILENO)) {
    std::cerr << "PIN: " << std::flush;
    termios old{};
    tcgetattr(STDIN_FILENO, &old);
    termios quiet = old;
    quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    tcsetattr(STDIN_FILENO, TCSANOW, &quiet);
    std::getline(std::cin, pin);
    tcsetattr(STDIN_FILENO, TCSANOW, &old);
    std::cerr << '\n';
  } else {
    std::getline(std::cin, pin);
  }
  pin = Trim(pin);
  if (pin.empty()) Usage("no PIN supplied");
  return pin;
}

std::uint64_t ParseSize(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    Usage("bad size: " + text);
  }
  const std::string suffix = text.substr(pos);
  if (suffix.empty() || suffix == "B") return value;
  if (suffix == "K" || suffix == "KiB") return value << 10;
  if (suffix == "M" || suffix == "MiB") return value << 20;
  if (suffix == "G" || suffix == "GiB") return value << 30;
  Usage("bad size suffix: " + text);
}

// Device state lives in a file; a missing file is created from the PUF flags.
struct DeviceOptions {
  std::string path;
  std::uint64_t puf_seed = 1;
  std::string table;

  void Add(CLI::App* cmd) {
    cmd->add_option("--device", path, "Device state file")->required();
    cmd->add_option("--puf-seed", puf_seed, "Seed for a new simulated PUF");
    cmd->add_option("--table", table, "CRP table CSV backing a new device");
  }

  void Open(DevicePtr& device) const {
    if (std::filesystem::exists(path)) {
      Check(pufhsm_device_load(path.c_str(), device.out()), "loading device");
      return;
    }
    PufPtr puf;
    if (table.empty()) {
      Check(pufhsm_puf_new_simulated(puf_seed, 16, 16, puf.out()), "creating PUF");
    } else {
      Check(pufhsm_puf_load_table(table.c_str(), puf.out()), "loading CRP table");
    }
    Check(pufhsm_device_new(puf.get(), device.out()), "creating device");
  }

  void Save(const DevicePtr& device) const {
    Check(pufhsm_device_save(device.get(), path.c_str()), "saving device");
  }
};

struct CredentialOptions {
  std::string key_file;
  std::string pin_file;

  void Add(CLI::App* cmd) {
    cmd->add_option("--key", key_file, "File whose bytes are the user key")->required();
    cmd->add_option("--pin-file", pin_file, "File holding the PIN (prompted if absent)");
  }
};

void PrintIndicator(pufhsm_indicator indicator) {
  if (indicator == PUFHSM_INDICATOR_GREEN) std::cout << "GREEN\n";
  if (indicator == PUFHSM_INDICATOR_RED) std::cout << "RED\n";
}

// ---- subcommands ---------------------------------------------------------

int Keygen(unsigned bits, std::optional<std::uint64_t> seed, const std::string& out) {
  KeyPtr key;
  Check(pufhsm_rsa_keygen(bits, seed.value_or(RandomSeed()), key.out()), "keygen");
  Check(pufhsm_rsa_key_save_public(key.get(), (out + ".pub").c_str()), "writing public key");
  Check(pufhsm_rsa_key_save_private(key.get(), (out + ".priv").c_str()), "writing private key");
  std::cout << "wrote " << out << ".pub and " << out << ".priv (" << bits << "-bit modulus)\n";
  return kExitOk;
}

int Seal(const std::string& in, const std::string& pub, const std::string& env,
         const std::string& wrapped, std::optional<std::uint64_t> seed) {
  KeyPtr key;
  Check(pufhsm_rsa_key_load(pub.c_str(), key.out()), "loading public key");
  Check(pufhsm_seal_file(in.c_str(), key.get(), seed.value_or(RandomSeed()), env.c_str(),
                         wrapped.c_str()),
        "seal");
  std::cout << "sealed " << in << " -> " << env << " + " << wrapped << '\n';
  return kExitOk;
}

int Unseal(const std::string& env, const std::string& wrapped, const std::string& priv,
           const std::string& out) {
  KeyPtr key;
  Check(pufhsm_rsa_key_load(priv.c_str(), key.out()), "loading private key");
  Check(pufhsm_unseal_file(env.c_str(), wrapped.c_str(), key.get(), out.c_str()), "unseal");
  std::cout << "recovered " << out << '\n';
  return kExitOk;
}

int Enroll(const DeviceOptions& dev, const CredentialOptions& cred) {
  const auto key = ReadBytes(cred.key_file);
  const auto pin = ReadPin(cred.pin_file);
  DevicePtr device;
  dev.Open(device);
  Check(pufhsm_device_enroll(device.get(), key.data(), key.size(), pin.c_str()), "enroll");
  dev.Save(device);
  std::cout << "enrolled (" << pufhsm_device_enrolled_count(device.get())
            << " credential(s) on device)\n";
  return kExitOk;
}

int Auth(const DeviceOptions& dev, const CredentialOptions& cred) {
  const auto key = ReadBytes(cred.key_file);
  const auto pin = ReadPin(cred.pin_file);
  DevicePtr device;
  dev.Open(device);
  int granted = 0;
  Check(pufhsm_device_authenticate(device.get(), key.data(), key.size(), pin.c_str(), &granted),
        "auth");
  dev.Save(device);
  PrintIndicator(pufhsm_device_indicator(device.get()));
  if (!granted) Domain("authentication failed");
  std::cout << "authenticated\n";
  return kExitOk;
}

struct SessionOptions {
  bool enroll = false;
  bool auth = false;
  bool decrypt = false;
  std::string env;
  std::string wrapped;
  std::string priv;
  std::string out;
  std::string tcp;
  bool transcript = false;
};

void RunTcpSession(const DeviceOptions& dev, DevicePtr& device, pufhsm_host* host,
                   const SessionOptions& opt, const std::vector<std::uint8_t>& key,
                   const std::string& pin, const std::vector<pufhsm_action>& script,
                   SessionResult& result) {
  ListenerPtr listener;
  Check(pufhsm_listener_open(opt.tcp.c_str(), listener.out()), "opening device listener");
  const auto port = pufhsm_listener_port(listener.get());
  std::cout.flush();
  std::cerr.flush();
  const pid_t child = fork();
  if (child < 0) Domain(std::string("fork failed: ") + std::strerror(errno));
  if (child == 0) {
    // Device side: serve one host connection, then persist state.
    int code = 0;
    if (pufhsm_device_serve(device.get(), listener.get()) != PUFHSM_OK ||
        pufhsm_device_save(device.get(), dev.path.c_str()) != PUFHSM_OK) {
      std::cerr << "device: " << pufhsm_last_error() << '\n';
      code = 1;
    }
    std::_Exit(code);
  }
  pufhsm_listener_free(listener.p);
  listener.p = nullptr;
  const std::string address = "127.0.0.1:" + std::to_string(port);
  const auto status = pufhsm_session_run_tcp(host, address.c_str(), key.data(), key.size(),
                                             pin.c_str(), script.data(), script.size(), &result.r);
  int wstatus = 0;
  waitpid(child, &wstatus, 0);
  Check(status, "session");
  if (!WIFEXITED(wstatus) || WEXITSTATUS(wstatus) != 0) Domain("device process failed");
}

int Session(const DeviceOptions& dev, const CredentialOptions& cred, const SessionOptions& opt) {
  std::vector<pufhsm_action> script;
  if (opt.enroll) script.push_back(PUFHSM_ACTION_ENROLL);
  if (opt.auth) script.push_back(PUFHSM_ACTION_AUTH);
  if (opt.decrypt) script.push_back(PUFHSM_ACTION_DECRYPT);
  if (script.empty()) Usage("session needs at least one of --enroll, --auth, --decrypt");
  if (opt.decrypt && opt.out.empty()) Usage("--decrypt requires --out");

  const auto key = ReadBytes(cred.key_file);
  const auto pin = ReadPin(cred.pin_file);
  KeyPtr priv;
  Check(pufhsm_rsa_key_load(opt.priv.c_str(), priv.out()), "loading private key");
  HostPtr host;
  Check(pufhsm_host_load(opt.env.c_str(), opt.wrapped.c_str(), priv.get(), host.out()),
        "loading envelope");
  DevicePtr device;
  dev.Open(device);

  SessionResult result;
  if (opt.tcp.empty()) {
    Check(pufhsm_session_run(device.get(), host.get(), key.data(), key.size(), pin.c_str(),
                             script.data(), script.size(), nullptr, 0, &result.r),
          "session");
    dev.Save(device);
  } else {
    RunTcpSession(dev, device, host.get(), opt, key, pin, script, result);
  }

  if (opt.transcript) {
    std::cerr.write(reinterpret_cast<const char*>(result.r.transcript.data),
                    static_cast<std::streamsize>(result.r.transcript.len));
  }
  PrintIndicator(result.r.indicator);
  if (result.r.plaintext_delivered) {
    WriteBytes(opt.out, result.r.plaintext.data, result.r.plaintext.len);
    std::cout << "decrypted -> " << opt.out << '\n';
  }
  if (result.r.first_error != PUFHSM_OK) {
    Domain(std::string("session: ") + pufhsm_status_name(result.r.first_error));
  }
  if (opt.auth && !result.r.granted) Domain("authentication failed");
  if (result.r.denied) Domain("decryption denied: not authenticated");
  return kExitOk;
}

int BenchTime(const std::string& sizes_text, unsigned repeats, const std::string& priv,
              std::optional<std::uint64_t> seed, std::string workdir, const std::string& out) {
  std::vector<std::uint64_t> sizes;
  std::stringstream ss(sizes_text);
  for (std::string item; std::getline(ss, item, ',');) sizes.push_back(ParseSize(Trim(item)));
  if (sizes.empty()) Usage("--sizes is empty");
  KeyPtr key;
  if (priv.empty()) {
    Check(pufhsm_rsa_keygen(2048, seed.value_or(1), key.out()), "keygen");
  } else {
    Check(pufhsm_rsa_key_load(priv.c_str(), key.out()), "loading private key");
  }
  if (workdir.empty()) workdir = std::filesystem::temp_directory_path().string();
  std::vector<pufhsm_timing_row> rows(2 * sizes.size());
  Check(pufhsm_bench_timing(sizes.data(), sizes.size(), repeats, key.get(), workdir.c_str(),
                            out.empty() ? nullptr : out.c_str(), rows.data()),
        "bench-time");
  std::printf("%14s  %-8s %10s %10s %10s\n", "file_size", "process", "real_s", "user_s",
              "sys_s");
  for (const auto& r : rows) {
    std::printf("%14llu  %-8s %10.4f", static_cast<unsigned long long>(r.file_size),
                r.process == 0 ? "Encrypt" : "Decrypt", r.real_s);
    if (r.has_cpu_times) {
      std::printf(" %10.4f %10.4f\n", r.user_s, r.sys_s);
    } else {
      std::printf(" %10s %10s\n", "-", "-");
    }
  }
  // Mean real time must not fall as the payload grows.
  for (int process = 0; process < 2; ++process) {
    double previous = -1.0;
    std::uint64_t previous_size = 0;
    for (const auto& r : rows) {
      if (r.process != process) continue;
      if (r.file_size >= previous_size && r.real_s < previous) {
        Domain(std::string(process == 0 ? "Encrypt" : "Decrypt") +
               " real time decreased with payload size");
      }
      previous = r.real_s;
      previous_size = r.file_size;
    }
  }
  return kExitOk;
}

int BenchUniq(const DeviceOptions& puf_opt, const std::string& challenge_file,
              unsigned experiments, const std::string& out) {
  PufPtr puf;
  std::vector<std::string> lines;
  if (!puf_opt.table.empty()) {
    Check(pufhsm_puf_load_table(puf_opt.table.c_str(), puf.out()), "loading CRP table");
  } else {
    if (challenge_file.empty()) Usage("a simulated PUF needs --challenges");
    Check(pufhsm_puf_new_simulated(puf_opt.puf_seed, 16, 16, puf.out()), "creating PUF");
  }
  if (!challenge_file.empty()) {
    std::ifstream in(challenge_file);
    if (!in) Usage("cannot open " + challenge_file);
    for (std::string line; std::getline(in, line);) {
      line = Trim(line);
      if (!line.empty()) lines.push_back(line);
    }
  }
  std::vector<const char*> ptrs;
  for (const auto& l : lines) ptrs.push_back(l.c_str());
  pufhsm_uniqueness_result r{};
  Check(pufhsm_bench_uniqueness(puf.get(), ptrs.empty() ? nullptr : ptrs.data(), ptrs.size(),
                                experiments, out.empty() ? nullptr : out.c_str(), &r),
        "bench-uniq");
  std::printf("trials %llu, distinct responses %llu, accepted %llu\n",
              static_cast<unsigned long long>(r.total_trials),
              static_cast<unsigned long long>(r.distinct_total),
              static_cast<unsigned long long>(r.accepted));
  // Whole percent, truncated.
  std::printf("uniqueness %llu/%llu = %.4f (%d%%)\n",
              static_cast<unsigned long long>(r.distinct_total),
              static_cast<unsigned long long>(r.total_trials), r.ratio,
              static_cast<int>(std::floor(r.ratio * 100.0 + 1e-9)));
  return kExitOk;
}

int BenchIntegrity(const std::string& a, const std::string& b) {
  pufhsm_integrity_report r{};
  Check(pufhsm_bench_integrity(a.c_str(), b.c_str(), &r), "bench-integrity");
  std::printf("size before %llu, after %llu, byte-identical %s, digest match %s\n",
              static_cast<unsigned long long>(r.size_before),
              static_cast<unsigned long long>(r.size_after), r.byte_identical ? "yes" : "no",
              r.digest_match ? "yes" : "no");
  if (!r.byte_identical || !r.digest_match) Domain("files differ");
  return kExitOk;
}

int PufStats(std::size_t instances, std::size_t challenges, std::size_t stages, std::size_t bits,
             std::uint64_t seed, std::size_t repeats, double sigma) {
  pufhsm_puf_stats s{};
  Check(pufhsm_puf_stats_simulated(instances, challenges, stages, bits, seed, repeats, sigma, &s),
        "puf-stats");
  std::printf("inter-instance mean fractional HD  %.4f\n", s.inter_instance_hd);
  std::printf("intra-instance mean fractional HD  %.4f\n", s.reliability_intra_hd);
  std::printf("distinct-response uniqueness        %.4f\n", s.distinct_response_ratio);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PUF-gated hybrid file encryption and HSM simulator"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", std::string(pufhsm_version()));

  unsigned bits = 2048;
  std::optional<std::uint64_t> seed;
  std::string out, in, pub, priv, env, wrapped;

  auto* keygen = app.add_subcommand("keygen", "Generate an RSA key pair");
  keygen->add_option("--bits", bits, "Modulus size in bits")->capture_default_str();
  keygen->add_option("--seed", seed, "Deterministic seed");
  keygen->add_option("--out", out, "Output prefix (writes PREFIX.pub and PREFIX.priv)")
      ->required();

  auto* seal = app.add_subcommand("seal", "Encrypt a file into an envelope");
  seal->add_option("--in", in, "Plaintext file")->required()->check(CLI::ExistingFile);
  seal->add_option("--pub", pub, "Public key file")->required();
  seal->add_option("--out", env, "Envelope output file")->required();
  seal->add_option("--wrapped", wrapped, "Wrapped key output file")->required();
  seal->add_option("--seed", seed, "Deterministic seed for key material");

  auto* unseal = app.add_subcommand("unseal", "Decrypt an envelope directly with the private key");
  unseal->add_option("--env", env, "Envelope file")->required();
  unseal->add_option("--wrapped", wrapped, "Wrapped key file")->required();
  unseal->add_option("--priv", priv, "Private key file")->required();
  unseal->add_option("--out", out, "Recovered plaintext file")->required();

  DeviceOptions dev;
  CredentialOptions cred;
  auto* enroll = app.add_subcommand("enroll", "Enroll a key and PIN on the device");
  dev.Add(enroll);
  cred.Add(enroll);

  auto* auth = app.add_subcommand("auth", "Authenticate a key and PIN against the device");
  dev.Add(auth);
  cred.Add(auth);

  SessionOptions sopt;
  auto* session = app.add_subcommand("session", "Run a host/device session over the serial link");
  dev.Add(session);
  cred.Add(session);
  session->add_flag("--enroll", sopt.enroll, "Enroll the credentials");
  session->add_flag("--auth", sopt.auth, "Authenticate the credentials");
  session->add_flag("--decrypt", sopt.decrypt, "Request decryption of the envelope");
  session->add_option("--env", sopt.env, "Envelope file")->required();
  session->add_option("--wrapped", sopt.wrapped, "Wrapped key file")->required();
  session->add_option("--priv", sopt.priv, "Private key file")->required();
  session->add_option("--out", sopt.out, "Recovered plaintext file");
  session->add_option("--tcp", sopt.tcp, "Run the device in a child process on HOST:PORT");
  session->add_flag("--transcript", sopt.transcript, "Print the session transcript to stderr");

  std::string sizes = "1M,16M,256M";
  unsigned repeats = 10;
  std::string workdir;
  auto* bench_time = app.add_subcommand("bench-time", "Time encryption and decryption");
  bench_time->add_option("--sizes", sizes, "Comma-separated sizes (K/M/G suffixes)")
      ->capture_default_str();
  bench_time->add_option("--repeats", repeats, "Repeats per size")->capture_default_str();
  bench_time->add_option("--priv", priv, "Private key file (default: seeded 2048-bit key)");
  bench_time->add_option("--seed", seed, "Seed for the generated key");
  bench_time->add_option("--workdir", workdir, "Scratch directory");
  bench_time->add_option("--out", out, "CSV output file");

  DeviceOptions uniq_puf;
  std::string challenge_file;
  unsigned experiments = 2;
  auto* bench_uniq = app.add_subcommand("bench-uniq", "Measure distinct-response uniqueness");
  bench_uniq->add_option("--table", uniq_puf.table, "CRP table CSV");
  bench_uniq->add_option("--puf-seed", uniq_puf.puf_seed, "Seed of a simulated PUF");
  bench_uniq->add_option("--challenges", challenge_file, "File with one challenge per line");
  bench_uniq->add_option("--experiments", experiments, "Experiment count")->capture_default_str();
  bench_uniq->add_option("--out", out, "CSV output file");

  std::string file_a, file_b;
  auto* bench_integrity = app.add_subcommand("bench-integrity", "Compare two files");
  bench_integrity->add_option("original", file_a)->required();
  bench_integrity->add_option("recovered", file_b)->required();

  std::size_t instances = 50, n_challenges = 1000, stages = 16, width = 16, stat_repeats = 5;
  std::uint64_t stat_seed = 1;
  double sigma = 0.0;
  auto* puf_stats = app.add_subcommand("puf-stats", "Statistics over simulated PUF instances");
  puf_stats->add_option("--instances", instances)->capture_default_str();
  puf_stats->add_option("--challenges", n_challenges)->capture_default_str();
  puf_stats->add_option("--stages", stages)->capture_default_str();
  puf_stats->add_option("--bits", width)->capture_default_str();
  puf_stats->add_option("--seed", stat_seed)->capture_default_str();
  puf_stats->add_option("--repeats", stat_repeats)->capture_default_str();
  puf_stats->add_option("--sigma", sigma, "Evaluation noise")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*keygen) return Keygen(bits, seed, out);
    if (*seal) return Seal(in, pub, env, wrapped, seed);
    if (*unseal) return Unseal(env, wrapped, priv, out);
    if (*enroll) return Enroll(dev, cred);
    if (*auth) return Auth(dev, cred);
    if (*session) return Session(dev, cred, sopt);
    if (*bench_time) return BenchTime(sizes, repeats, priv, seed, workdir, out);
    if (*bench_uniq) return BenchUniq(uniq_puf, challenge_file, experiments, out);
    if (*bench_integrity) return BenchIntegrity(file_a, file_b);
    if (*puf_stats) {
      return PufStats(instances, n_challenges, stages, width, stat_seed, stat_repeats, sigma);
    }
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  }
  return kExitUsage;
}
