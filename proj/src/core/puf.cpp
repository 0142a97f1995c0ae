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

#include "pufhsm/puf.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "pufhsm/error.hpp"

namespace pufhsm {

template <class Tag>
Bits<Tag>::Bits(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) Require(b <= 1, "bit values must be 0 or 1");
}

template <class Tag>
Bits<Tag> Bits<Tag>::FromString(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch == ' ') continue;
    Require(ch == '0' || ch == '1',
            "bit string may only contain 0 and 1: '" + std::string(text) + "'");
    bits.push_back(ch == '1' ? 1 : 0);
  }
  Require(!bits.empty(), "empty bit string");
  return Bits(std::move(bits));
}

template <class Tag>
Bits<Tag> Bits<Tag>::FromWord(std::uint64_t word, std::size_t width) {
  Require(width >= 1 && width <= 64, "word width must be in [1, 64]");
  Bits out(width);
  for (std::size_t i = 0; i < width; ++i) {
    out.bits_[i] = static_cast<std::uint8_t>((word >> (width - 1 - i)) & 1U);
  }
  return out;
}

template <class Tag>
std::string Bits<Tag>::ToString() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

template <class Tag>
std::uint64_t Bits<Tag>::ToWord() const {
  Require(bits_.size() <= 64, "bit vector too wide for a word");
  std::uint64_t w = 0;
  for (auto b : bits_) w = (w << 1) | b;
  return w;
}

template class Bits<ChallengeTag>;
template class Bits<ResponseTag>;

std::size_t HammingDistance(const Response& a, const Response& b) {
  Require(a.width() == b.width(), "hamming distance needs equal widths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.width(); ++i) d += a[i] != b[i];
  return d;
}

// ---------------------------------------------------------------------------
// CrpTable

CrpTable::CrpTable(std::vector<CrpRow> rows) {
  for (auto& r : rows) Append(std::move(r));
}

std::size_t CrpTable::width() const {
  return rows_.empty() ? 0 : rows_.front().challenge.width();
}

void CrpTable::Append(CrpRow row) {
  Require(row.challenge.width() >= 1, "empty challenge");
  Require(row.challenge.width() == row.response.width(),
          "challenge and response widths differ");
  if (!rows_.empty()) {
    Require(row.challenge.width() == width(), "mixed challenge widths in table");
  }
  for (const auto& r : rows_) {
    Require(!(r.experiment_id == row.experiment_id && r.challenge == row.challenge),
            "duplicate (experiment, challenge) row: " +
                std::to_string(row.experiment_id) + "," + row.challenge.ToString());
  }
  rows_.push_back(std::move(row));
}

namespace {

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CrpTable CrpTable::ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      Trim(line) != "experiment,challenge,response,verdict") {
    Fail(ErrorCode::kFormat,
         "CRP CSV must start with header experiment,challenge,response,verdict");
  }
  CrpTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    auto f = SplitCsv(line);
    if (f.size() != 4) {
      Fail(ErrorCode::kFormat, "CRP CSV line " + std::to_string(lineno) +
                                   ": expected 4 fields");
    }
    CrpRow row;
    try {
      row.experiment_id = std::stoi(f[0]);
      row.challenge = Challenge::FromString(f[1]);
      row.response = Response::FromString(f[2]);
    } catch (const std::exception& e) {
      Fail(ErrorCode::kFormat,
           "CRP CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    if (f[3] == "V" || f[3] == "v") {
      row.verdict = Verdict::kAccepted;
    } else if (f[3] == "x" || f[3] == "X") {
      row.verdict = Verdict::kRejected;
    } else {
      Fail(ErrorCode::kFormat, "CRP CSV line " + std::to_string(lineno) +
                                   ": verdict must be V or x");
    }
    try {
      table.Append(std::move(row));
    } catch (const Error& e) {
      Fail(ErrorCode::kFormat,
           "CRP CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

CrpTable CrpTable::LoadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open CRP table " + path);
  return ReadCsv(in);
}

void CrpTable::WriteCsv(std::ostream& out) const {
  out << "experiment,challenge,response,verdict\n";
  for (const auto& r : rows_) {
    out << r.experiment_id << ',' << r.challenge.ToString() << ','
        << r.response.ToString() << ','
        << (r.verdict == Verdict::kAccepted ? "V" : "x") << '\n';
  }
}

// ---------------------------------------------------------------------------
// PufInstance

std::vector<double> ParityFeatures(const Challenge& challenge,
                                   std::size_t n_stages) {
  const std::size_t width = challenge.width();
  Require(width >= 1, "empty challenge");
  std::vector<double> phi(n_stages + 1, 1.0);
  double acc = 1.0;
  for (std::size_t i = n_stages; i-- > 0;) {
    acc *= challenge[i % width] ? -1.0 : 1.0;
    phi[i] = acc;
  }
  return phi;
}

PufInstance::PufInstance(SimulatedPuf sim) {
  Require(sim.n_stages >= 1, "n_stages must be >= 1");
  Require(sim.n_bits >= 1, "n_bits must be >= 1");
  Require(sim.weights.size() == sim.n_bits * (sim.n_stages + 1),
          "weight matrix must be n_bits x (n_stages + 1)");
  width_ = sim.n_bits;
  model_ = std::move(sim);
}

PufInstance::PufInstance(TableBackedPuf table) {
  Require(!table.table.empty(), "table-backed PUF needs at least one row");
  width_ = table.table.width();
  for (const auto& r : table.table.rows()) {
    auto [it, inserted] = lookup_.emplace(r.challenge, r.response);
    Require(inserted || it->second == r.response,
            "conflicting responses for challenge " + r.challenge.ToString());
  }
  model_ = std::move(table);
}

const SimulatedPuf& PufInstance::simulated() const {
  if (!is_simulated()) Fail(ErrorCode::kUnsupported, "PUF is table-backed");
  return std::get<SimulatedPuf>(model_);
}

const CrpTable& PufInstance::table() const {
  if (is_simulated()) Fail(ErrorCode::kUnsupported, "PUF is simulated");
  return std::get<TableBackedPuf>(model_).table;
}

std::vector<double> PufInstance::DelayDifferences(const Challenge& challenge) const {
  const auto& sim = simulated();
  Require(challenge.width() == width_,
          "challenge width " + std::to_string(challenge.width()) +
              " does not match PUF width " + std::to_string(width_));
  const auto phi = ParityFeatures(challenge, sim.n_stages);
  const std::size_t cols = sim.n_stages + 1;
  std::vector<double> out(sim.n_bits, 0.0);
  for (std::size_t k = 0; k < sim.n_bits; ++k) {
    const double* w = sim.weights.data() + k * cols;
    double sum = 0.0;
    for (std::size_t i = 0; i < cols; ++i) sum += w[i] * phi[i];
    out[k] = sum;
  }
  return out;
}

Response PufInstance::Eval(const Challenge& challenge) const {
  Require(challenge.width() == width_,
          "challenge width " + std::to_string(challenge.width()) +
              " does not match PUF width " + std::to_string(width_));
  if (!is_simulated()) {
    auto it = lookup_.find(challenge);
    if (it == lookup_.end()) {
      Fail(ErrorCode::kUnknownChallenge,
           "challenge " + challenge.ToString() + " not in CRP table");
    }
    return it->second;
  }
  const auto sums = DelayDifferences(challenge);
  Response r(width_);
  // A sum of exactly zero resolves to 0.
  for (std::size_t k = 0; k < sums.size(); ++k) r.set(k, sums[k] > 0.0);
  return r;
}

Response PufInstance::EvalNoisy(const Challenge& challenge, double noise_sigma,
                                std::uint64_t rng_seed) const {
  if (!is_simulated()) {
    Fail(ErrorCode::kUnsupported, "noisy evaluation needs a simulated PUF");
  }
  Require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  auto sums = DelayDifferences(challenge);
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (auto& s : sums) s += noise(rng);
  }
  Response r(width_);
  for (std::size_t k = 0; k < sums.size(); ++k) r.set(k, sums[k] > 0.0);
  return r;
}

PufInstance NewSimulatedPuf(std::uint64_t seed, std::size_t n_stages,
                            std::size_t n_bits) {
  Require(n_stages >= 1, "n_stages must be >= 1");
  Require(n_bits >= 1, "n_bits must be >= 1");
  SimulatedPuf sim;
  sim.seed = seed;
  sim.n_stages = n_stages;
  sim.n_bits = n_bits;
  sim.weights.resize(n_bits * (n_stages + 1));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& w : sim.weights) w = normal(rng);
  return PufInstance(std::move(sim));
}

std::vector<Challenge> RandomChallenges(std::size_t count, std::size_t width,
                                        std::uint64_t seed) {
  Require(width >= 1, "challenge width must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Challenge> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Challenge c(width);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < width; ++i) {
      if (i % 64 == 0) word = rng();
      c.set(i, (word >> (i % 64)) & 1U);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

double DistinctResponseRatio(const CrpTable& table) {
  Require(!table.empty(), "uniqueness of an empty CRP table");
  std::map<int, std::set<Response>> distinct;
  for (const auto& r : table.rows()) distinct[r.experiment_id].insert(r.response);
  std::size_t sum = 0;
  for (const auto& [id, responses] : distinct) sum += responses.size();
  return static_cast<double>(sum) / static_cast<double>(table.size());
}

double InterInstanceUniqueness(std::span<const PufInstance> population,
                               std::span<const Challenge> challenges) {
  Require(population.size() >= 2, "inter-instance uniqueness needs >= 2 instances");
  Require(!challenges.empty(), "inter-instance uniqueness needs >= 1 challenge");
  const std::size_t width = population.front().width();
  for (const auto& p : population) Require(p.width() == width, "mixed PUF widths");

  std::vector<std::vector<Response>> responses;
  responses.reserve(population.size());
  for (const auto& p : population) {
    std::vector<Response> row;
    row.reserve(challenges.size());
    for (const auto& c : challenges) row.push_back(p.Eval(c));
    responses.push_back(std::move(row));
  }
  double total = 0.0;
  std::size_t terms = 0;
  for (std::size_t a = 0; a < responses.size(); ++a) {
    for (std::size_t b = a + 1; b < responses.size(); ++b) {
      for (std::size_t c = 0; c < challenges.size(); ++c) {
        total += static_cast<double>(HammingDistance(responses[a][c], responses[b][c])) /
                 static_cast<double>(width);
        ++terms;
      }
    }
  }
  return total / static_cast<double>(terms);
}

double Reliability(const PufInstance& puf, std::span<const Challenge> challenges,
                   std::size_t repeats, double noise_sigma, std::uint64_t rng_seed) {
  if (!puf.is_simulated()) {
    Fail(ErrorCode::kUnsupported, "reliability needs a simulated PUF");
  }
  Require(repeats >= 2, "reliability needs repeats >= 2");
  Require(!challenges.empty(), "reliability needs >= 1 challenge");
  Require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  const double width = static_cast<double>(puf.width());
  double total = 0.0;
  for (std::size_t i = 0; i < challenges.size(); ++i) {
    const Response reference = puf.Eval(challenges[i]);
    double per_challenge = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(rng_seed),
                        static_cast<std::uint32_t>(rng_seed >> 32),
                        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(r)};
      std::array<std::uint32_t, 2> words{};
      seq.generate(words.begin(), words.end());
      const std::uint64_t seed = (std::uint64_t{words[0]} << 32) | words[1];
      const Response noisy = puf.EvalNoisy(challenges[i], noise_sigma, seed);
      per_challenge += static_cast<double>(HammingDistance(reference, noisy)) / width;
    }
    total += per_challenge / static_cast<double>(repeats);
  }
  return total / static_cast<double>(challenges.size());
}

}  // namespace pufhsm
