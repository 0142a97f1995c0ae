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

#ifndef PUFHSM_BENCH_HPP_
#define PUFHSM_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pufhsm/puf.hpp"
#include "pufhsm/rsa.hpp"

namespace pufhsm {

enum class Process { kEncrypt, kDecrypt };
const char* ProcessName(Process process);

// Averages over `repeats` runs. user_s / sys_s are empty where the platform
// does not report process CPU times.
struct TimingRow {
  std::uint64_t file_size_bytes = 0;
  Process process = Process::kEncrypt;
  double real_s = 0.0;
  std::optional<double> user_s;
  std::optional<double> sys_s;
  unsigned repeats = 1;
};

// Encrypt = read plaintext file, seal, write envelope and wrapped key.
// Decrypt = read both files, unseal, write the recovered file.
// Payload files live in `workdir` and are removed afterwards.
std::vector<TimingRow> RunTiming(std::span<const std::uint64_t> sizes, unsigned repeats,
                                 const RsaKeyPair& key, const std::filesystem::path& workdir,
                                 std::uint64_t seed = 1);

// Header: file_size,process,real_s,user_s,sys_s,repeats
void WriteTimingCsv(std::ostream& out, std::span<const TimingRow> rows);

// Mean real time per size for one process, in the order of `rows`.
bool RealTimeNonDecreasing(std::span<const TimingRow> rows, Process process);

struct IntegrityReport {
  std::uint64_t size_before = 0;
  std::uint64_t size_after = 0;
  bool byte_identical = false;
  bool digest_match = false;
};

// Streams both files; never holds either one in memory.
IntegrityReport VerifyIntegrity(const std::filesystem::path& original,
                                const std::filesystem::path& roundtripped);

struct UniquenessReport {
  std::size_t total_trials = 0;
  std::vector<std::size_t> distinct_per_experiment;
  double ratio = 0.0;
  std::vector<Verdict> per_row_verdicts;
  CrpTable table;
};

// Evaluates every challenge once per experiment (experiment ids start at 1).
// A row is Accepted when its response equals `enrolled`, which defaults to the
// response of the first challenge.
UniquenessReport RunUniqueness(const PufInstance& puf, std::span<const Challenge> challenges,
                               unsigned experiments,
                               const std::optional<Response>& enrolled = std::nullopt);

}  // namespace pufhsm

#endif  // PUFHSM_BENCH_HPP_
