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

// Leakage-rate estimation for finite-battery policies.
//
// With the state of charge B_t hidden, (X_t, Y_t) is a hidden-Markov
// process. For a simulated pair of sequences the estimator computes
//   -(1/n) log2 P(y^n)   and   -(1/n) log2 P(y^n | x^n)
// with per-step normalized forward recursions over B_t; their difference is
// an unbiased-in-expectation estimate of (1/n) I(X^n; Y^n).
//
// Also here: an exhaustive small-n oracle for the same quantity, the
// best-effort outage counter for an unbounded battery, and the random-walk
// threshold-crossing experiment behind the store-and-hide argument.

#ifndef SMARTLEAK_LEAKAGE_SIM_HPP_
#define SMARTLEAK_LEAKAGE_SIM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "smartleak/core.hpp"
#include "smartleak/parallel.hpp"
#include "smartleak/policies.hpp"
#include "smartleak/random.hpp"

namespace smartleak {

struct SimOptions {
  std::int64_t n = 1000000;
  int seeds = 10;
  // Seeds used are seed_base, seed_base + 1, ..., seed_base + seeds - 1.
  std::uint64_t seed_base = 1;
  int threads = 1;
};

struct SeedRecord {
  std::uint64_t seed = 0;
  double hy_rate = 0.0;
  double hy_given_x_rate = 0.0;
};

struct LeakageEstimate {
  double bits_per_slot = 0.0;
  // Standard error of the mean across seeds; 0 when seeds == 1.
  double std_error = 0.0;
  std::int64_t n = 0;
  int seeds = 0;
  double hy_rate = 0.0;
  double hy_given_x_rate = 0.0;
  std::vector<SeedRecord> records;
};

// Normalized forward recursion over the hidden state of charge. Each
// Observe() multiplies the belief by a substochastic kernel K(b, b') and
// renormalizes. Normalizers are multiplied into a running scale and only
// folded into the log-likelihood when the scale gets small.
class ForwardFilter {
 public:
  explicit ForwardFilter(int states, int initial_state = 0)
      : belief_(states, 0.0), scratch_(states, 0.0) {
    belief_.at(initial_state) = 1.0;
  }

  // kernel points to a row-major states x states matrix.
  void Observe(const double* kernel) {
    const int s = static_cast<int>(belief_.size());
    double norm = 0.0;
    if (s == 1) {
      norm = kernel[0];
    } else {
      for (int c = 0; c < s; ++c) {
        double acc = 0.0;
        for (int b = 0; b < s; ++b) acc += belief_[b] * kernel[b * s + c];
        scratch_[c] = acc;
        norm += acc;
      }
      if (norm > 0.0) {
        const double inv = 1.0 / norm;
        for (int c = 0; c < s; ++c) belief_[c] = scratch_[c] * inv;
      }
    }
    if (!(norm > 0.0)) {
      throw NumericalError(
          "ForwardFilter: observed symbol has zero probability under the "
          "chain (simulator and kernel disagree)");
    }
    scale_ *= norm;
    if (scale_ < 1e-250) Flush();
  }

  // log2 of the probability of everything observed so far.
  double Log2Likelihood() {
    Flush();
    return log2_likelihood_;
  }

  std::span<const double> belief() const { return belief_; }

 private:
  void Flush() {
    log2_likelihood_ += std::log2(scale_);
    scale_ = 1.0;
  }

  std::vector<double> belief_;
  std::vector<double> scratch_;
  double scale_ = 1.0;
  double log2_likelihood_ = 0.0;
};

namespace internal {

// Kernels laid out for the filters, each an S x S block: block y of
// y_kernel is sum_x p(x, y, b'|b); block x * |Y| + y of xy_kernel is
// p(y, b'|b, x).
struct FilterKernels {
  int states = 0;
  std::vector<double> y_kernel;
  std::vector<double> xy_kernel;

  const double* y_block(int y) const {
    return y_kernel.data() + static_cast<std::size_t>(y) * states * states;
  }
  const double* xy_block(int x, int y, int k) const {
    return xy_kernel.data() +
           (static_cast<std::size_t>(x) * k + y) * states * states;
  }
};

inline FilterKernels MakeFilterKernels(const ChainSpec& chain, const Pmf& p_x) {
  const int s = chain.states();
  const int k = chain.x_size();
  FilterKernels out;
  out.states = s;
  const std::size_t block = static_cast<std::size_t>(s) * s;
  out.y_kernel.assign(k * block, 0.0);
  out.xy_kernel.assign(static_cast<std::size_t>(k) * k * block, 0.0);
  for (int b = 0; b < s; ++b)
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y)
        for (int c = 0; c < s; ++c) {
          const double j = chain.joint(b, x, y, c);
          const std::size_t cell = static_cast<std::size_t>(b) * s + c;
          out.y_kernel[y * block + cell] += j;
          if (p_x[x] > 0.0) {
            out.xy_kernel[(static_cast<std::size_t>(x) * k + y) * block + cell] +=
                j / p_x[x];
          }
        }
  return out;
}

inline SeedRecord SimulateSeed(const GridModel& model, const ChainSpec& chain,
                               const FilterKernels& kernels, std::int64_t n,
                               std::uint64_t seed) {
  const int s = chain.states();
  const int kx = chain.x_size();
  const int ke = chain.e_size();
  const std::int64_t b_max = model.b_max.quanta();
  CdfSampler x_sampler(model.p_x.probs());
  CdfSampler e_sampler(model.p_e.probs());
  std::vector<CdfSampler> y_samplers(static_cast<std::size_t>(s) * kx * ke);
  std::vector<double> row(kx);
  for (int b = 0; b < s; ++b)
    for (int x = 0; x < kx; ++x)
      for (int e = 0; e < ke; ++e) {
        for (int y = 0; y < kx; ++y) row[y] = chain.step(b, x, e, y);
        y_samplers[(static_cast<std::size_t>(b) * kx + x) * ke + e].Reset(row);
      }

  RandomStream rng(seed);
  ForwardFilter marginal(s);
  ForwardFilter conditional(s);
  std::int64_t b = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    // Exactly three draws per slot keeps streams aligned across policies
    // that share a seed (common random numbers).
    const double ux = rng.Uniform();
    const double ue = rng.Uniform();
    const double uy = rng.Uniform();
    const int x = x_sampler.Sample(ux);
    const int e = e_sampler.Sample(ue);
    const int y =
        y_samplers[(static_cast<std::size_t>(b) * kx + x) * ke + e].Sample(uy);
    b = std::min<std::int64_t>(b + e - (x - y), b_max);
    marginal.Observe(kernels.y_block(y));
    conditional.Observe(kernels.xy_block(x, y, kx));
  }
  const double dn = static_cast<double>(n);
  return {seed, -marginal.Log2Likelihood() / dn,
          -conditional.Log2Likelihood() / dn};
}

}  // namespace internal

// Monte-Carlo estimate of the leakage rate of a time-invariant policy on a
// finite battery. The chain starts empty (B_0 = 0) and no burn-in is
// discarded.
inline LeakageEstimate EstimateLeakage(const GridModel& model,
                                       const Policy& policy,
                                       const SimOptions& options = {}) {
  if (options.n < 1 || options.seeds < 1) {
    throw InvalidArgumentError("EstimateLeakage: need n >= 1 and seeds >= 1");
  }
  const ChainSpec chain = BuildChain(model, policy);
  const internal::FilterKernels kernels =
      internal::MakeFilterKernels(chain, model.p_x);
  LeakageEstimate est;
  est.n = options.n;
  est.seeds = options.seeds;
  est.records.resize(options.seeds);
  ParallelFor(est.records.size(), options.threads, [&](std::size_t i) {
    est.records[i] = internal::SimulateSeed(model, chain, kernels, options.n,
                                            options.seed_base + i);
  });
  double sum = 0.0;
  double hy = 0.0;
  double hyx = 0.0;
  for (const auto& r : est.records) {
    sum += r.hy_rate - r.hy_given_x_rate;
    hy += r.hy_rate;
    hyx += r.hy_given_x_rate;
  }
  const double m = static_cast<double>(options.seeds);
  est.hy_rate = hy / m;
  est.hy_given_x_rate = hyx / m;
  est.bits_per_slot = est.hy_rate - est.hy_given_x_rate;
  if (options.seeds > 1) {
    double ss = 0.0;
    for (const auto& r : est.records) {
      const double d = (r.hy_rate - r.hy_given_x_rate) - est.bits_per_slot;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / (m - 1.0) / m);
  }
  return est;
}

// Exact (1/n) I(X^n; Y^n) by enumerating demand sequences and propagating
// the joint law of (output prefix, state of charge) through the policy.
// Supports time-varying policies and unbounded batteries (the SOC cannot
// exceed n * E_max within n slots).
inline double BruteForceRate(const GridModel& model, const Policy& policy,
                             int n, double budget = 2e8) {
  if (n < 1) throw InvalidArgumentError("BruteForceRate: n must be >= 1");
  ValidatePolicy(policy, model);
  const int kx = static_cast<int>(model.p_x.size());
  const int ke = static_cast<int>(model.p_e.size());
  const std::int64_t cap = model.b_max.is_infinite()
                               ? static_cast<std::int64_t>(n) * model.e_max()
                               : model.b_max.quanta();
  const int states = static_cast<int>(cap) + 1;
  const double work = std::pow(static_cast<double>(kx), 2.0 * n) * states * ke;
  if (work > budget) {
    throw BudgetExceededError("BruteForceRate: enumeration exceeds budget");
  }
  std::size_t y_count = 1;
  for (int t = 0; t < n; ++t) y_count *= kx;

  // Cache outcome lists per (t, b, x, e); only StoreAndHide depends on t.
  const bool time_varying = !IsTimeInvariant(policy);
  std::map<std::array<std::int64_t, 4>, std::vector<Outcome>> cache;
  auto outcomes = [&](std::int64_t t, std::int64_t b, int x,
                      int e) -> const std::vector<Outcome>& {
    const std::array<std::int64_t, 4> key{time_varying ? t : 0, b, x, e};
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, StepOutcomes(policy, model, b, x, e, t)).first;
    }
    return it->second;
  };

  std::vector<double> p_y(y_count, 0.0);
  double h_y_given_x = 0.0;
  std::vector<int> xs(n, 0);
  std::vector<double> cur, next;
  for (std::size_t xi = 0; xi < y_count; ++xi) {
    std::size_t rem = xi;
    double p_xs = 1.0;
    for (int t = 0; t < n; ++t) {
      xs[t] = static_cast<int>(rem % kx);
      rem /= kx;
      p_xs *= model.p_x[xs[t]];
    }
    if (p_xs == 0.0) continue;
    // cur[prefix * states + b], prefix encoded little-endian in base |Y|.
    cur.assign(states, 0.0);
    cur[0] = 1.0;
    std::size_t prefixes = 1;
    std::size_t place = 1;
    for (int t = 0; t < n; ++t) {
      next.assign(prefixes * kx * states, 0.0);
      const int x = xs[t];
      for (std::size_t pre = 0; pre < prefixes; ++pre)
        for (int b = 0; b < states; ++b) {
          const double mass = cur[pre * states + b];
          if (mass == 0.0) continue;
          for (int e = 0; e < ke; ++e) {
            if (model.p_e[e] == 0.0) continue;
            for (const Outcome& o : outcomes(t, b, x, e)) {
              const std::int64_t c = BatteryUpdate(b, e, x, o.y, model.b_max);
              const std::size_t code = pre + place * o.y;
              next[code * states + static_cast<std::size_t>(std::min(c, cap))] +=
                  mass * model.p_e[e] * o.prob;
            }
          }
        }
      cur.swap(next);
      prefixes *= kx;
      place *= kx;
    }
    for (std::size_t yi = 0; yi < y_count; ++yi) {
      double p = 0.0;
      for (int b = 0; b < states; ++b) p += cur[yi * states + b];
      if (p > 0.0) {
        h_y_given_x -= p_xs * p * std::log2(p);
        p_y[yi] += p_xs * p;
      }
    }
  }
  double h_y = 0.0;
  for (double p : p_y) h_y += EntropyTerm(p);
  return std::max(0.0, h_y - h_y_given_x) / n;
}

struct OutageResult {
  double fraction = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  int seeds = 0;
};

// E[X - Y*] for a channel under p_x.
inline double ExpectedChannelDraw(const Pmf& p_x, const ConditionalPmf& channel) {
  return ExpectedBatteryDraw(p_x, channel);
}

// Fraction of slots in which the best-effort policy on an unbounded battery
// cannot follow the channel (b + e < x - y*). Requires E[X - Y*] < E[E].
inline OutageResult OutageExperiment(const GridModel& model,
                                     const ConditionalPmf& channel,
                                     const SimOptions& options) {
  if (!model.b_max.is_infinite()) {
    throw InvalidArgumentError("OutageExperiment: battery must be unbounded");
  }
  if (channel.size() != model.p_x.size()) {
    throw InvalidArgumentError("OutageExperiment: channel size != |X|");
  }
  if (!(ExpectedChannelDraw(model.p_x, channel) < model.mean_renewable())) {
    throw InvalidArgumentError(
        "OutageExperiment: requires E[X - Y*] < mean renewable rate");
  }
  const int kx = static_cast<int>(model.p_x.size());
  std::vector<CdfSampler> rows(kx);
  for (int x = 0; x < kx; ++x) rows[x].Reset(channel.row(x).probs());
  std::vector<double> fractions(options.seeds);
  ParallelFor(fractions.size(), options.threads, [&](std::size_t i) {
    RandomStream rng(options.seed_base + i);
    CdfSampler xs(model.p_x.probs());
    CdfSampler es(model.p_e.probs());
    std::int64_t b = 0;
    std::int64_t outages = 0;
    for (std::int64_t t = 0; t < options.n; ++t) {
      const int x = xs.Sample(rng.Uniform());
      const int e = es.Sample(rng.Uniform());
      const int y_star = rows[x].Sample(rng.Uniform());
      int y = y_star;
      if (b + e < x - y_star || x - y_star > model.p_hat) {
        ++outages;
        y = x;
      }
      b = BatteryUpdate(b, e, x, y, model.b_max);
    }
    fractions[i] = static_cast<double>(outages) / static_cast<double>(options.n);
  });
  OutageResult out;
  out.n = options.n;
  out.seeds = options.seeds;
  const double m = static_cast<double>(options.seeds);
  out.fraction = std::accumulate(fractions.begin(), fractions.end(), 0.0) / m;
  if (options.seeds > 1) {
    double ss = 0.0;
    for (double f : fractions) ss += (f - out.fraction) * (f - out.fraction);
    out.std_error = std::sqrt(ss / (m - 1.0) / m);
  }
  return out;
}

struct WalkResult {
  double crossing_fraction = 0.0;
  double wald_bound = 0.0;
  std::int64_t s_n = 0;
  int trials = 0;
  double std_error = 0.0;
  double r_star = 0.0;
  double mean_q = 0.0;
  double threshold = 0.0;
};

// Law of the per-slot battery increment Q = E - (X - Y*) as value -> mass.
inline std::map<int, double> IncrementLaw(const GridModel& model,
                                          const ConditionalPmf& channel) {
  std::map<int, double> law;
  for (std::size_t e = 0; e < model.p_e.size(); ++e)
    for (std::size_t x = 0; x < model.p_x.size(); ++x)
      for (std::size_t y = 0; y <= x; ++y) {
        const double m = model.p_e[e] * model.p_x[x] * channel(x, y);
        if (m > 0.0) {
          law[static_cast<int>(e) - static_cast<int>(x - y)] += m;
        }
      }
  return law;
}

// Log moment generating function ln E[exp(r Q)], computed stably.
inline double LogMgf(const std::map<int, double>& law, double r) {
  double peak = -std::numeric_limits<double>::infinity();
  for (auto [q, m] : law) peak = std::max(peak, r * q);
  double sum = 0.0;
  for (auto [q, m] : law) sum += m * std::exp(r * q - peak);
  return peak + std::log(sum);
}

// Negative root r* of the log-MGF for a walk with positive drift. Returns
// -infinity when Q is never negative (the walk cannot move down).
inline double NegativeMgfRoot(const std::map<int, double>& law) {
  double mean = 0.0;
  for (auto [q, m] : law) mean += q * m;
  if (!(mean > 0.0)) {
    throw NumericalError("NegativeMgfRoot: increment drift must be positive");
  }
  if (law.begin()->first >= 0) return -std::numeric_limits<double>::infinity();
  double hi = -1e-12;  // LogMgf < 0 just left of the origin
  double lo = -1.0;
  while (LogMgf(law, lo) <= 0.0) {
    hi = lo;
    lo *= 2.0;
    if (lo < -64.0) {
      throw NumericalError("NegativeMgfRoot: root not bracketed in [-64, 0)");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (LogMgf(law, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Hiding-phase random walk S_t = Q_1 + ... + Q_t over n slots against the
// threshold alpha = -s_n * E[E]. Reports the fraction of trials that ever
// reach S_t <= alpha and the Wald bound exp(-r* alpha).
inline WalkResult RandomWalkExperiment(const GridModel& model,
                                       const ConditionalPmf& channel,
                                       std::int64_t s_n, std::int64_t n,
                                       int trials, std::uint64_t seed = 1) {
  if (s_n < 0 || n < 1 || trials < 1) {
    throw InvalidArgumentError("RandomWalkExperiment: bad sizes");
  }
  const std::map<int, double> law = IncrementLaw(model, channel);
  WalkResult out;
  out.s_n = s_n;
  out.trials = trials;
  for (auto [q, m] : law) out.mean_q += q * m;
  out.r_star = NegativeMgfRoot(law);
  out.threshold = -static_cast<double>(s_n) * model.mean_renewable();
  out.wald_bound = std::isinf(out.r_star)
                       ? 0.0
                       : std::exp(-out.r_star * out.threshold);

  std::vector<int> values;
  std::vector<double> masses;
  for (auto [q, m] : law) {
    values.push_back(q);
    masses.push_back(m);
  }
  CdfSampler sampler(masses);
  RandomStream rng(seed);
  int crossed = 0;
  for (int trial = 0; trial < trials; ++trial) {
    double walk = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
      walk += values[sampler.Sample(rng.Uniform())];
      if (walk <= out.threshold) {
        ++crossed;
        break;
      }
    }
  }
  out.crossing_fraction = static_cast<double>(crossed) / trials;
  out.std_error = std::sqrt(out.crossing_fraction * (1.0 - out.crossing_fraction) /
                            trials);
  return out;
}

}  // namespace smartleak

#endif  // SMARTLEAK_LEAKAGE_SIM_HPP_
