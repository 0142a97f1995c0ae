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

#include "pufhsm/bench.hpp"

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "pufhsm/envelope.hpp"
#include "pufhsm/error.hpp"

namespace pufhsm {
namespace {

constexpr std::size_t kChunk = std::size_t{1} << 20;

struct CpuTimes {
  double user = 0.0;
  double sys = 0.0;
};

std::optional<CpuTimes> ProcessCpuTimes() {
  rusage usage{};
  if (::getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  auto seconds = [](const timeval& tv) {
    return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) * 1e-6;
  };
  return CpuTimes{seconds(usage.ru_utime), seconds(usage.ru_stime)};
}

struct Measurement {
  double real = 0.0;
  std::optional<double> user;
  std::optional<double> sys;
};

template <class F>
Measurement Measure(F&& body) {
  const auto cpu0 = ProcessCpuTimes();
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  const auto cpu1 = ProcessCpuTimes();
  Measurement m;
  m.real = std::chrono::duration<double>(t1 - t0).count();
  if (cpu0 && cpu1) {
    m.user = cpu1->user - cpu0->user;
    m.sys = cpu1->sys - cpu0->sys;
  }
  return m;
}

void WriteRandomFile(const std::filesystem::path& path, std::uint64_t size, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot create " + path.string());
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> buf(kChunk / 8);
  std::uint64_t remaining = size;
  while (remaining > 0) {
    for (auto& w : buf) w = rng();
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunk));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
    remaining -= n;
  }
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path.string());
}

TimingRow Average(std::uint64_t size, Process process, const std::vector<Measurement>& runs) {
  TimingRow row;
  row.file_size_bytes = size;
  row.process = process;
  row.repeats = static_cast<unsigned>(runs.size());
  double real = 0.0, user = 0.0, sys = 0.0;
  bool have_cpu = true;
  for (const auto& m : runs) {
    real += m.real;
    if (m.user && m.sys) {
      user += *m.user;
      sys += *m.sys;
    } else {
      have_cpu = false;
    }
  }
  const double n = static_cast<double>(runs.size());
  row.real_s = real / n;
  if (have_cpu) {
    row.user_s = user / n;
    row.sys_s = sys / n;
  }
  return row;
}

}  // namespace

const char* ProcessName(Process process) {
  return process == Process::kEncrypt ? "Encrypt" : "Decrypt";
}

std::vector<TimingRow> RunTiming(std::span<const std::uint64_t> sizes, unsigned repeats,
                                 const RsaKeyPair& key, const std::filesystem::path& workdir,
                                 std::uint64_t seed) {
  Require(repeats >= 1, "repeats must be >= 1");
  Require(!sizes.empty(), "no payload sizes given");
  std::error_code ec;
  std::filesystem::create_directories(workdir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + workdir.string() + ": " + ec.message());

  // Plaintext, envelope and recovered copy coexist on disk.
  const std::uint64_t largest = *std::max_element(sizes.begin(), sizes.end());
  const std::uint64_t needed = largest * 3 + (std::uint64_t{16} << 20);
  const auto space = std::filesystem::space(workdir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot query free space in " + workdir.string());
  if (space.available < needed) {
    Fail(ErrorCode::kResource, "insufficient disk space in " + workdir.string() + ": need " +
                                   std::to_string(needed) + " bytes, have " +
                                   std::to_string(space.available));
  }

  const auto public_key = key.public_key();
  const auto private_key = key.private_key();
  const auto plain_path = workdir / "timing.plain.bin";
  const auto env_path = workdir / "timing.env.bin";
  const auto wkey_path = workdir / "timing.wkey.bin";
  const auto out_path = workdir / "timing.out.bin";

  std::vector<TimingRow> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint64_t size = sizes[i];
    std::vector<Measurement> enc, dec;
    for (unsigned r = 0; r < repeats; ++r) {
      // Fresh payload per run, generated outside the timed region.
      WriteRandomFile(plain_path, size, (seed + i) * 7919 + r);
      enc.push_back(Measure([&] {
        const auto data = ReadFileBytes(plain_path.string());
        const auto sealed = Seal(data, public_key, seed * 1000003 + r);
        SaveEnvelope(env_path.string(), sealed.envelope);
        SaveWrappedKey(wkey_path.string(), sealed.wrapped_key);
      }));
      dec.push_back(Measure([&] {
        const auto env = LoadEnvelope(env_path.string());
        const auto wk = LoadWrappedKey(wkey_path.string());
        const auto plain = Unseal(env, wk, private_key);
        WriteFileBytes(out_path.string(), plain);
      }));
    }
    rows.push_back(Average(size, Process::kEncrypt, enc));
    rows.push_back(Average(size, Process::kDecrypt, dec));
  }
  for (const auto& p : {plain_path, env_path, wkey_path, out_path}) {
    std::filesystem::remove(p, ec);
  }
  return rows;
}

void WriteTimingCsv(std::ostream& out, std::span<const TimingRow> rows) {
  out << "file_size,process,real_s,user_s,sys_s,repeats\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& r : rows) {
    out << r.file_size_bytes << ',' << ProcessName(r.process) << ',' << std::to_string(r.real_s)
        << ',' << opt(r.user_s) << ',' << opt(r.sys_s) << ',' << r.repeats << '\n';
  }
}

bool RealTimeNonDecreasing(std::span<const TimingRow> rows, Process process) {
  std::map<std::uint64_t, double> by_size;
  for (const auto& r : rows) {
    if (r.process == process) by_size[r.file_size_bytes] = r.real_s;
  }
  double prev = -1.0;
  for (const auto& [size, t] : by_size) {
    if (t < prev) return false;
    prev = t;
  }
  return true;
}

IntegrityReport VerifyIntegrity(const std::filesystem::path& original,
                                const std::filesystem::path& roundtripped) {
  std::ifstream a(original, std::ios::binary);
  if (!a) Fail(ErrorCode::kIo, "cannot open " + original.string());
  std::ifstream b(roundtripped, std::ios::binary);
  if (!b) Fail(ErrorCode::kIo, "cannot open " + roundtripped.string());

  IntegrityReport report;
  report.byte_identical = true;
  Sha256Stream ha, hb;
  std::vector<std::uint8_t> ba(kChunk), bb(kChunk);
  while (true) {
    a.read(reinterpret_cast<char*>(ba.data()), static_cast<std::streamsize>(ba.size()));
    b.read(reinterpret_cast<char*>(bb.data()), static_cast<std::streamsize>(bb.size()));
    const auto na = static_cast<std::size_t>(a.gcount());
    const auto nb = static_cast<std::size_t>(b.gcount());
    if (a.bad() || b.bad()) Fail(ErrorCode::kIo, "read error while comparing files");
    report.size_before += na;
    report.size_after += nb;
    ha.Update(std::span(ba).first(na));
    hb.Update(std::span(bb).first(nb));
    if (na != nb || !std::equal(ba.begin(), ba.begin() + static_cast<std::ptrdiff_t>(na),
                                bb.begin())) {
      report.byte_identical = false;
    }
    if (na == 0 && nb == 0) break;
  }
  report.digest_match = ha.Finish() == hb.Finish();
  return report;
}

UniquenessReport RunUniqueness(const PufInstance& puf, std::span<const Challenge> challenges,
                               unsigned experiments, const std::optional<Response>& enrolled) {
  Require(!challenges.empty(), "uniqueness run needs at least one challenge");
  Require(experiments >= 1, "uniqueness run needs at least one experiment");
  const Response reference = enrolled ? *enrolled : puf.Eval(challenges.front());
  UniquenessReport report;
  for (unsigned e = 1; e <= experiments; ++e) {
    std::set<Response> distinct;
    for (const auto& c : challenges) {
      CrpRow row;
      row.experiment_id = static_cast<int>(e);
      row.challenge = c;
      row.response = puf.Eval(c);
      row.verdict = row.response == reference ? Verdict::kAccepted : Verdict::kRejected;
      distinct.insert(row.response);
      report.per_row_verdicts.push_back(row.verdict);
      report.table.Append(std::move(row));
    }
    report.distinct_per_experiment.push_back(distinct.size());
  }
  report.total_trials = report.table.size();
  report.ratio = DistinctResponseRatio(report.table);
  return report;
}

}  // namespace pufhsm
