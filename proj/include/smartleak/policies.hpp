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

// Energy management policies and battery dynamics.
//
// Every slot the unit observes demand x, renewable arrival e and state of
// charge b, and requests y from the grid with
//   x - min(b + e, P_hat) <= y <= x,  y >= 0,
// after which the battery moves to min(b + e - (x - y), B_max). The battery
// is charged only from the renewable source.

#ifndef SMARTLEAK_POLICIES_HPP_
#define SMARTLEAK_POLICIES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "smartleak/core.hpp"

namespace smartleak {

// Follow p*(y|x) whenever the stored plus arriving energy covers the request,
// otherwise pass the demand through.
struct BestEffort {
  ConditionalPmf channel;
};

// Pass demand through for the first storage_len slots, then act as
// BestEffort with the same channel.
struct StoreAndHide {
  std::int64_t storage_len = 0;
  ConditionalPmf channel;
};

// Storage phase length ceil(sqrt(n)): grows without bound but is o(n).
inline std::int64_t DefaultStorageLength(std::int64_t n) {
  if (n < 0) throw InvalidArgumentError("DefaultStorageLength: n must be >= 0");
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (s * s < n) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= n) --s;
  return s;
}

// Mask a demand with probability p_v whenever enough energy is available.
struct BatteryIndependent {
  double p_v = 0.0;
};

// As BatteryIndependent with one masking probability per state of charge.
struct BatteryConditioned {
  std::vector<double> p_v;
};

// Use all, half, or none of the available energy. p[0..2] are the
// probabilities of using all of it when b + e < x, b + e = x and b + e > x;
// p[3..5] are the matching probabilities of using half of it.
struct ThreeLevel {
  std::array<double, 6> p{};
};

using Policy =
    std::variant<BestEffort, StoreAndHide, BatteryIndependent,
                 BatteryConditioned, ThreeLevel>;

struct SimState {
  std::int64_t b = 0;
  std::int64_t t = 0;
};

struct FeasibleRange {
  int y_lo = 0;
  int y_hi = 0;
};

// One possible grid request with its probability.
struct Outcome {
  int y = 0;
  double prob = 0.0;
};

inline constexpr std::int64_t kMaxCharge = std::int64_t{1} << 62;

inline FeasibleRange FeasibleOutputs(int x, int e, std::int64_t b, int p_hat) {
  if (x < 0 || e < 0 || b < 0) {
    throw InvalidArgumentError("FeasibleOutputs: negative argument");
  }
  const std::int64_t reach = std::min<std::int64_t>(b + e, p_hat);
  return {static_cast<int>(std::max<std::int64_t>(0, x - reach)), x};
}

inline std::int64_t BatteryUpdate(std::int64_t b, int e, int x, int y,
                                  BatteryCapacity b_max) {
  const std::int64_t next = b + e - (x - y);
  if (y > x || next < 0) {
    throw InvalidArgumentError("BatteryUpdate: request not covered by energy");
  }
  if (b_max.is_infinite()) {
    if (next > kMaxCharge) throw NumericalError("BatteryUpdate: SOC overflow");
    return next;
  }
  return std::min(next, b_max.quanta());
}

namespace internal {

inline void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgumentError(std::string(what) + " must lie in [0, 1]");
  }
}

inline void AddOutcome(std::vector<Outcome>& out, int y, double prob) {
  if (prob <= 0.0) return;
  for (auto& o : out) {
    if (o.y == y) {
      o.prob += prob;
      return;
    }
  }
  out.push_back({y, prob});
}

inline void BestEffortOutcomes(const ConditionalPmf& channel, int x, int e,
                               std::int64_t b, int p_hat,
                               std::vector<Outcome>& out) {
  const FeasibleRange range = FeasibleOutputs(x, e, b, p_hat);
  for (int y = 0; y <= x; ++y) {
    const double w = channel(x, y);
    if (w == 0.0) continue;
    AddOutcome(out, y >= range.y_lo ? y : x, w);
  }
}

// Full masking of the demand when energy and peak allow it.
inline void MaskingOutcomes(double p_v, int x, int e, std::int64_t b,
                            int p_hat, std::vector<Outcome>& out) {
  const bool can_mask = x >= 1 && FeasibleOutputs(x, e, b, p_hat).y_lo == 0;
  if (!can_mask) {
    AddOutcome(out, x, 1.0);
    return;
  }
  AddOutcome(out, 0, p_v);
  AddOutcome(out, x, 1.0 - p_v);
}

}  // namespace internal

// Checks the policy's invariants against the instance.
inline void ValidatePolicy(const Policy& policy, const GridModel& model) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BestEffort> ||
                      std::is_same_v<T, StoreAndHide>) {
          if (p.channel.size() != model.p_x.size()) {
            throw InvalidArgumentError("policy channel size != |X|");
          }
          for (std::size_t x = 0; x < p.channel.size(); ++x)
            for (std::size_t y = 0; y < p.channel.size(); ++y) {
              const bool inside =
                  y <= x && static_cast<int>(x - y) <= model.p_hat;
              if (!inside && p.channel(x, y) != 0.0) {
                throw InvalidArgumentError(
                    "policy channel violates 0 <= x - y <= P_hat");
              }
            }
          if constexpr (std::is_same_v<T, StoreAndHide>) {
            if (p.storage_len < 0) {
              throw InvalidArgumentError("StoreAndHide: storage_len < 0");
            }
          }
        } else if constexpr (std::is_same_v<T, BatteryIndependent>) {
          internal::CheckProbability(p.p_v, "p_v");
        } else if constexpr (std::is_same_v<T, BatteryConditioned>) {
          if (model.b_max.is_infinite() ||
              static_cast<std::int64_t>(p.p_v.size()) != model.b_max.quanta() + 1) {
            throw InvalidArgumentError(
                "BatteryConditioned: need one p_v per state of charge");
          }
          for (double v : p.p_v) internal::CheckProbability(v, "p_v");
        } else {
          for (double v : p.p) internal::CheckProbability(v, "p_i");
          for (int i = 0; i < 3; ++i) {
            if (p.p[i] + p.p[i + 3] > 1.0 + 1e-12) {
              throw InvalidArgumentError("ThreeLevel: p_i + p_{i+3} > 1");
            }
          }
        }
      },
      policy);
}

// Distribution of the grid request y for one slot, given the state of
// charge b, demand x, arrival e and slot index t (0-based).
inline std::vector<Outcome> StepOutcomes(const Policy& policy,
                                         const GridModel& model,
                                         std::int64_t b, int x, int e,
                                         std::int64_t t) {
  std::vector<Outcome> out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BestEffort>) {
          internal::BestEffortOutcomes(p.channel, x, e, b, model.p_hat, out);
        } else if constexpr (std::is_same_v<T, StoreAndHide>) {
          if (t < p.storage_len) {
            internal::AddOutcome(out, x, 1.0);
          } else {
            internal::BestEffortOutcomes(p.channel, x, e, b, model.p_hat, out);
          }
        } else if constexpr (std::is_same_v<T, BatteryIndependent>) {
          internal::MaskingOutcomes(p.p_v, x, e, b, model.p_hat, out);
        } else if constexpr (std::is_same_v<T, BatteryConditioned>) {
          const double p_v = p.p_v.at(static_cast<std::size_t>(b));
          internal::MaskingOutcomes(p_v, x, e, b, model.p_hat, out);
        } else {
          const std::int64_t available = b + e;
          const int slot = available < x ? 0 : (available == x ? 1 : 2);
          const std::int64_t cap = std::min(x, model.p_hat);
          // "Half" rounds down, and neither level may exceed the demand or
          // the peak draw.
          const int full = static_cast<int>(std::min(available, cap));
          const int half = static_cast<int>(std::min(available / 2, cap));
          const double p_full = p.p[slot];
          const double p_half = p.p[slot + 3];
          internal::AddOutcome(out, x - full, p_full);
          internal::AddOutcome(out, x - half, p_half);
          internal::AddOutcome(out, x, 1.0 - p_full - p_half);
        }
      },
      policy);
  std::sort(out.begin(), out.end(),
            [](const Outcome& a, const Outcome& b) { return a.y < b.y; });
  return out;
}

// Advances one slot: picks y by inverse CDF over StepOutcomes with the
// uniform draw u, then updates the battery.
inline int PolicyStep(const Policy& policy, const GridModel& model, int x,
                      int e, SimState& state, double u) {
  if (x < 0 || x > model.x_max() || e < 0 || e > model.e_max()) {
    throw InvalidArgumentError("PolicyStep: x or e outside its alphabet");
  }
  const std::vector<Outcome> outcomes =
      StepOutcomes(policy, model, state.b, x, e, state.t);
  int y = outcomes.back().y;
  double acc = 0.0;
  for (const auto& o : outcomes) {
    acc += o.prob;
    if (u < acc) {
      y = o.y;
      break;
    }
  }
  state.b = BatteryUpdate(state.b, e, x, y, model.b_max);
  ++state.t;
  return y;
}

// Markov chain over the state of charge for a time-invariant policy on a
// finite battery. Index conventions:
//   joint(b, x, y, b')   = p(x, y, b' | b)
//   step(b, x, e, y)     = p(y | b, x, e)
//   transition(b, b')    = sum_{x,y} joint(b, x, y, b')
class ChainSpec {
 public:
  ChainSpec(int states, int x_size, int e_size)
      : states_(states),
        x_size_(x_size),
        e_size_(e_size),
        joint_(static_cast<std::size_t>(states) * x_size * x_size * states, 0.0),
        step_(static_cast<std::size_t>(states) * x_size * e_size * x_size, 0.0),
        transition_(static_cast<std::size_t>(states) * states, 0.0) {}

  int states() const { return states_; }
  int x_size() const { return x_size_; }
  int e_size() const { return e_size_; }

  double joint(int b, int x, int y, int b_next) const {
    return joint_[JointIndex(b, x, y, b_next)];
  }
  double& joint(int b, int x, int y, int b_next) {
    return joint_[JointIndex(b, x, y, b_next)];
  }
  double step(int b, int x, int e, int y) const {
    return step_[StepIndex(b, x, e, y)];
  }
  double& step(int b, int x, int e, int y) { return step_[StepIndex(b, x, e, y)]; }
  double transition(int b, int b_next) const {
    return transition_[static_cast<std::size_t>(b) * states_ + b_next];
  }
  double& transition(int b, int b_next) {
    return transition_[static_cast<std::size_t>(b) * states_ + b_next];
  }

  // Stationary distribution by power iteration on the SOC chain.
  std::vector<double> Stationary(int max_iterations = 100000,
                                 double tol = 1e-14) const {
    std::vector<double> pi(states_, 1.0 / states_);
    std::vector<double> next(states_);
    for (int it = 0; it < max_iterations; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int b = 0; b < states_; ++b)
        for (int c = 0; c < states_; ++c) next[c] += pi[b] * transition(b, c);
      double diff = 0.0;
      for (int b = 0; b < states_; ++b) diff += std::abs(next[b] - pi[b]);
      pi.swap(next);
      if (diff < tol) break;
    }
    return pi;
  }

 private:
  std::size_t JointIndex(int b, int x, int y, int c) const {
    return ((static_cast<std::size_t>(b) * x_size_ + x) * x_size_ + y) * states_ + c;
  }
  std::size_t StepIndex(int b, int x, int e, int y) const {
    return ((static_cast<std::size_t>(b) * x_size_ + x) * e_size_ + e) * x_size_ + y;
  }

  int states_;
  int x_size_;
  int e_size_;
  std::vector<double> joint_;
  std::vector<double> step_;
  std::vector<double> transition_;
};

inline bool IsTimeInvariant(const Policy& policy) {
  return !std::holds_alternative<StoreAndHide>(policy);
}

// Builds the SOC chain and emission kernels for a finite battery.
inline ChainSpec BuildChain(const GridModel& model, const Policy& policy) {
  if (model.b_max.is_infinite()) {
    throw InvalidArgumentError("BuildChain: battery capacity must be finite");
  }
  if (!IsTimeInvariant(policy)) {
    throw InvalidArgumentError("BuildChain: policy must be time-invariant");
  }
  ValidatePolicy(policy, model);
  const int states = static_cast<int>(model.b_max.quanta()) + 1;
  const int kx = static_cast<int>(model.p_x.size());
  const int ke = static_cast<int>(model.p_e.size());
  ChainSpec chain(states, kx, ke);
  for (int b = 0; b < states; ++b) {
    for (int x = 0; x < kx; ++x) {
      for (int e = 0; e < ke; ++e) {
        for (const Outcome& o : StepOutcomes(policy, model, b, x, e, 0)) {
          chain.step(b, x, e, o.y) += o.prob;
          const int next =
              static_cast<int>(BatteryUpdate(b, e, x, o.y, model.b_max));
          const double mass = model.p_x[x] * model.p_e[e] * o.prob;
          chain.joint(b, x, o.y, next) += mass;
          chain.transition(b, next) += mass;
        }
      }
    }
  }
  return chain;
}

}  // namespace smartleak

#endif  // SMARTLEAK_POLICIES_HPP_
