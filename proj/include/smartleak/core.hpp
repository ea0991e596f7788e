// Copyright 2026 The smartleak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Probability mass functions over integer energy-quantum alphabets, the
// information measures built on them, and the grid instance shared by all
// solvers and simulators. All logarithms are base 2.

#ifndef SMARTLEAK_CORE_HPP_
#define SMARTLEAK_CORE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smartleak {

// Raised on malformed inputs: invalid distributions, out-of-domain
// parameters, dimension mismatches.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure hits a state that indicates a bug or an
// unrecoverable condition (zero-probability observation, failed bracketing).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an exhaustive computation would exceed its work budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPmfTolerance = 1e-12;

// -p log2 p with the continuity convention 0 log 0 = 0.
inline double EntropyTerm(double p) {
  return p > 0.0 ? -p * std::log2(p) : 0.0;
}

// Probability mass function on the dense integer alphabet {0, 1, ..., K}.
// Immutable after construction; construction validates non-negativity and
// normalization (no silent renormalization).
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw InvalidArgumentError("Pmf: alphabet must contain at least one point");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidArgumentError("Pmf: entries must be finite and >= 0");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kPmfTolerance) {
      throw InvalidArgumentError("Pmf: entries sum to " +
                                 std::to_string(total) + ", expected 1");
    }
  }

  static Pmf PointMass(std::size_t at, std::size_t size) {
    std::vector<double> probs(size, 0.0);
    probs.at(at) = 1.0;
    return Pmf(std::move(probs));
  }

  static Pmf Uniform(std::size_t size) {
    return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
  }

  // Bernoulli(q) on {0, 1}.
  static Pmf Bernoulli(double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw InvalidArgumentError("Pmf::Bernoulli: q must lie in [0, 1]");
    }
    return Pmf({1.0 - q, q});
  }

  // Binomial(trials, p) on {0, ..., trials}.
  static Pmf Binomial(int trials, double p) {
    if (trials < 0 || !(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgumentError("Pmf::Binomial: bad parameters");
    }
    std::vector<double> probs(static_cast<std::size_t>(trials) + 1);
    double coeff = 1.0;
    for (int k = 0; k <= trials; ++k) {
      probs[k] = coeff * std::pow(p, k) * std::pow(1.0 - p, trials - k);
      coeff = coeff * (trials - k) / (k + 1);
    }
    // Exact up to rounding; absorb the residue so the invariant holds.
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& q : probs) q /= total;
    return Pmf(std::move(probs));
  }

  std::size_t size() const { return probs_.size(); }
  // Largest alphabet point K.
  int max_value() const { return static_cast<int>(probs_.size()) - 1; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  double Mean() const {
    double mean = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) mean += i * probs_[i];
    return mean;
  }

 private:
  std::vector<double> probs_;
};

// p(y|x): one Pmf row per input letter. Output and input alphabets coincide.
class ConditionalPmf {
 public:
  explicit ConditionalPmf(std::vector<std::vector<double>> rows) {
    if (rows.empty()) {
      throw InvalidArgumentError("ConditionalPmf: no rows");
    }
    rows_.reserve(rows.size());
    for (auto& row : rows) {
      if (row.size() != rows.size()) {
        throw InvalidArgumentError(
            "ConditionalPmf: row and column alphabets must be equal");
      }
      rows_.emplace_back(std::move(row));
    }
  }

  static ConditionalPmf Identity(std::size_t size) {
    std::vector<std::vector<double>> rows(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) rows[i][i] = 1.0;
    return ConditionalPmf(std::move(rows));
  }

  std::size_t size() const { return rows_.size(); }
  const Pmf& row(std::size_t x) const { return rows_[x]; }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }

 private:
  std::vector<Pmf> rows_;
};

// Battery capacity in quanta, or unbounded.
class BatteryCapacity {
 public:
  static BatteryCapacity Finite(std::int64_t quanta) {
    if (quanta < 0) {
      throw InvalidArgumentError("BatteryCapacity: capacity must be >= 0");
    }
    return BatteryCapacity(quanta);
  }
  static BatteryCapacity Infinite() { return BatteryCapacity(-1); }

  bool is_infinite() const { return quanta_ < 0; }
  std::int64_t quanta() const {
    if (is_infinite()) {
      throw InvalidArgumentError("BatteryCapacity: infinite capacity has no size");
    }
    return quanta_;
  }
  std::string ToString() const {
    return is_infinite() ? std::string("inf") : std::to_string(quanta_);
  }
  friend bool operator==(BatteryCapacity, BatteryCapacity) = default;

 private:
  explicit BatteryCapacity(std::int64_t quanta) : quanta_(quanta) {}
  std::int64_t quanta_;
};

// A complete problem instance: demand and renewable distributions, battery
// capacity and the peak draw P_hat from the renewable supply.
struct GridModel {
  GridModel(Pmf demand, Pmf renewable, BatteryCapacity capacity, int peak)
      : p_x(std::move(demand)),
        p_e(std::move(renewable)),
        b_max(capacity),
        p_hat(peak) {
    if (p_x.max_value() < 1) {
      throw InvalidArgumentError("GridModel: demand alphabet needs X_max >= 1");
    }
    if (p_hat < 1) {
      throw InvalidArgumentError("GridModel: peak draw must be positive");
    }
    if (p_e.Mean() > p_hat + 1e-12) {
      throw InvalidArgumentError(
          "GridModel: average renewable rate must not exceed the peak draw");
    }
  }

  // Binary instance X, E in {0, 1} with Pr{X=1}=q_x, Pr{E=1}=p_e, P_hat=1.
  static GridModel Binary(double q_x, double p_e, BatteryCapacity capacity) {
    return GridModel(Pmf::Bernoulli(q_x), Pmf::Bernoulli(p_e), capacity, 1);
  }

  int x_max() const { return p_x.max_value(); }
  int e_max() const { return p_e.max_value(); }
  double mean_renewable() const { return p_e.Mean(); }

  Pmf p_x;
  Pmf p_e;
  BatteryCapacity b_max;
  int p_hat;
};

inline double Entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) h += EntropyTerm(v);
  return h;
}

// Binary entropy function h(p).
inline double BinaryEntropy(double p) {
  return EntropyTerm(p) + EntropyTerm(1.0 - p);
}

namespace internal {

inline void CheckDimensions(const Pmf& p_x, const ConditionalPmf& channel) {
  if (p_x.size() != channel.size()) {
    throw InvalidArgumentError("dimension mismatch between p_X and channel");
  }
}

// Output marginal q(y) = sum_x p(x) W(y|x).
inline std::vector<double> OutputMarginal(const Pmf& p_x,
                                          const ConditionalPmf& channel) {
  std::vector<double> q(channel.size(), 0.0);
  for (std::size_t x = 0; x < channel.size(); ++x) {
    for (std::size_t y = 0; y < channel.size(); ++y) {
      q[y] += p_x[x] * channel(x, y);
    }
  }
  return q;
}

}  // namespace internal

// I(X;Y) = H(Y) - H(Y|X) in bits.
inline double MutualInformation(const Pmf& p_x, const ConditionalPmf& channel) {
  internal::CheckDimensions(p_x, channel);
  const std::vector<double> q = internal::OutputMarginal(p_x, channel);
  double mi = 0.0;
  for (std::size_t x = 0; x < channel.size(); ++x) {
    if (p_x[x] == 0.0) continue;
    for (std::size_t y = 0; y < channel.size(); ++y) {
      const double w = channel(x, y);
      if (w > 0.0) mi += p_x[x] * w * std::log2(w / q[y]);
    }
  }
  return std::max(mi, 0.0);
}

// E[X - Y] under p_X and a channel supported on y <= x.
inline double ExpectedBatteryDraw(const Pmf& p_x, const ConditionalPmf& channel) {
  internal::CheckDimensions(p_x, channel);
  double draw = 0.0;
  for (std::size_t x = 0; x < channel.size(); ++x) {
    for (std::size_t y = 0; y < channel.size(); ++y) {
      const double w = channel(x, y);
      if (w == 0.0) continue;
      if (y > x) {
        throw InvalidArgumentError(
            "ExpectedBatteryDraw: channel puts mass on y > x");
      }
      draw += p_x[x] * w * static_cast<double>(x - y);
    }
  }
  return draw;
}

}  // namespace smartleak

#endif  // SMARTLEAK_CORE_HPP_
