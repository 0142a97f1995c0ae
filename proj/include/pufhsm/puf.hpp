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

#ifndef PUFHSM_PUF_HPP_
#define PUFHSM_PUF_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pufhsm {

// Fixed-width bit vector. Bit 0 is the leftmost character of the textual
// form, so "1000" has bit 0 set.
template <class Tag>
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t width) : bits_(width, 0) {}
  explicit Bits(std::vector<std::uint8_t> bits);

  static Bits FromString(std::string_view text);
  static Bits FromWord(std::uint64_t word, std::size_t width);

  std::size_t width() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  std::span<const std::uint8_t> raw() const { return bits_; }
  std::string ToString() const;
  // Only valid for width <= 64; bit 0 becomes the most significant.
  std::uint64_t ToWord() const;

  friend bool operator==(const Bits&, const Bits&) = default;
  friend auto operator<=>(const Bits&, const Bits&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ChallengeTag {};
struct ResponseTag {};
using Challenge = Bits<ChallengeTag>;
using Response = Bits<ResponseTag>;

extern template class Bits<ChallengeTag>;
extern template class Bits<ResponseTag>;

std::size_t HammingDistance(const Response& a, const Response& b);

enum class Verdict { kAccepted, kRejected };

struct CrpRow {
  int experiment_id = 0;
  Challenge challenge;
  Response response;
  Verdict verdict = Verdict::kRejected;

  friend bool operator==(const CrpRow&, const CrpRow&) = default;
};

// Ordered challenge/response observations. All rows share one width and
// (experiment_id, challenge) is unique.
class CrpTable {
 public:
  CrpTable() = default;
  explicit CrpTable(std::vector<CrpRow> rows);

  void Append(CrpRow row);

  const std::vector<CrpRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t width() const;

  // CSV with header `experiment,challenge,response,verdict`; verdict is V or x.
  static CrpTable ReadCsv(std::istream& in);
  static CrpTable LoadCsv(const std::string& path);
  void WriteCsv(std::ostream& out) const;

 private:
  std::vector<CrpRow> rows_;
};

// Arbiter PUF under the additive linear-delay model, one stage chain per
// response bit. weights is row-major n_bits x (n_stages + 1); the last column
// is the constant (arbiter offset) term.
struct SimulatedPuf {
  std::uint64_t seed = 0;
  std::size_t n_stages = 0;
  std::size_t n_bits = 0;
  std::vector<double> weights;
};

struct TableBackedPuf {
  CrpTable table;
};

class PufInstance {
 public:
  explicit PufInstance(SimulatedPuf sim);
  explicit PufInstance(TableBackedPuf table);

  bool is_simulated() const { return std::holds_alternative<SimulatedPuf>(model_); }
  std::size_t width() const { return width_; }
  const SimulatedPuf& simulated() const;
  const CrpTable& table() const;

  Response Eval(const Challenge& challenge) const;
  Response EvalNoisy(const Challenge& challenge, double noise_sigma,
                     std::uint64_t rng_seed) const;

  // Pre-threshold delay differences, one per response bit.
  std::vector<double> DelayDifferences(const Challenge& challenge) const;

 private:
  std::variant<SimulatedPuf, TableBackedPuf> model_;
  std::map<Challenge, Response> lookup_;
  std::size_t width_ = 0;
};

PufInstance NewSimulatedPuf(std::uint64_t seed, std::size_t n_stages = 16,
                            std::size_t n_bits = 16);

// Parity feature vector of length n_stages + 1, phi_i = prod_{j >= i}
// (1 - 2 c_j), phi_{n_stages} = 1. Stage i reads challenge bit i mod width.
std::vector<double> ParityFeatures(const Challenge& challenge,
                                   std::size_t n_stages);

std::vector<Challenge> RandomChallenges(std::size_t count, std::size_t width,
                                        std::uint64_t seed);

// Sum over experiments of distinct responses in that experiment, divided by
// the row count.
double DistinctResponseRatio(const CrpTable& table);

double InterInstanceUniqueness(std::span<const PufInstance> population,
                               std::span<const Challenge> challenges);

double Reliability(const PufInstance& puf, std::span<const Challenge> challenges,
                   std::size_t repeats, double noise_sigma,
                   std::uint64_t rng_seed = 0);

struct PufStats {
  double distinct_response_ratio = 0.0;
  double inter_instance_hd = 0.0;
  double reliability_intra_hd = 0.0;
};

}  // namespace pufhsm

#endif  // PUFHSM_PUF_HPP_
