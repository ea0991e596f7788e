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

// Shannon lower bounds for continuous demand. Each bound is h(X) minus the
// largest differential entropy the battery draw X - Y can have under the
// constraints: a truncated exponential for mean + peak, a uniform for peak
// only. Differential entropies are passed in and returned in bits.

#ifndef SMARTLEAK_SLB_HPP_
#define SMARTLEAK_SLB_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "smartleak/core.hpp"

namespace smartleak {

// Density (1 / lambda0) exp(-x / lambda1) on [0, p_hat]. When the mean
// constraint is inactive (p_bar >= p_hat / 2) the maximizer is the uniform
// density, flagged by `uniform` with lambda1 = +inf and lambda0 = p_hat.
struct TruncExpParams {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double p_bar = 0.0;
  double p_hat = 0.0;
  bool uniform = false;

  double Density(double x) const {
    if (x < 0.0 || x > p_hat) return 0.0;
    return uniform ? 1.0 / lambda0 : std::exp(-x / lambda1) / lambda0;
  }

  // Mean of the density (equals p_bar unless the fit is uniform).
  double Mean() const { return uniform ? 0.5 * p_hat : p_bar; }

  // Differential entropy in bits: (ln lambda0 + mean / lambda1) / ln 2.
  double EntropyBits() const {
    const double mean_term = uniform ? 0.0 : Mean() / lambda1;
    return (std::log(lambda0) + mean_term) / std::numbers::ln2;
  }
};

namespace internal {

// Mean of the exponential with scale lambda truncated to [0, p_hat].
inline double TruncExpMean(double lambda, double p_hat) {
  if (std::isinf(p_hat)) return lambda;
  return lambda - p_hat / std::expm1(p_hat / lambda);
}

}  // namespace internal

inline TruncExpParams FitTruncExp(double p_bar, double p_hat) {
  if (!(p_bar > 0.0) || !(p_hat > 0.0)) {
    throw InvalidArgumentError("FitTruncExp: need p_bar > 0 and p_hat > 0");
  }
  if (p_bar >= p_hat) {
    throw InvalidArgumentError("FitTruncExp: need p_bar < p_hat");
  }
  TruncExpParams out;
  out.p_bar = p_bar;
  out.p_hat = p_hat;
  if (std::isinf(p_hat)) {
    out.lambda1 = p_bar;
    out.lambda0 = p_bar;
    return out;
  }
  if (p_bar >= 0.5 * p_hat) {
    out.uniform = true;
    out.lambda1 = std::numeric_limits<double>::infinity();
    out.lambda0 = p_hat;
    return out;
  }
  // The truncated mean increases from 0 to p_hat / 2 in lambda.
  double lo = p_bar * 1e-3;
  double hi = p_bar;
  while (internal::TruncExpMean(lo, p_hat) > p_bar) lo *= 0.5;
  while (internal::TruncExpMean(hi, p_hat) < p_bar) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw NumericalError("FitTruncExp: scale not bracketed");
    }
  }
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (internal::TruncExpMean(mid, p_hat) < p_bar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.lambda1 = 0.5 * (lo + hi);
  out.lambda0 = -out.lambda1 * std::expm1(-p_hat / out.lambda1);
  return out;
}

// Lower bound on the privacy-power function under average and peak
// constraints.
inline double SlbAvgPeak(double h_x_bits, double p_bar, double p_hat) {
  return h_x_bits - FitTruncExp(p_bar, p_hat).EntropyBits();
}

// Lower bound under a peak constraint only.
inline double SlbPeakOnly(double h_x_bits, double p_hat) {
  if (!(p_hat > 0.0)) throw InvalidArgumentError("SlbPeakOnly: p_hat must be > 0");
  return h_x_bits - std::log2(p_hat);
}

struct PeakAtom {
  double peak = 0.0;
  double prob = 0.0;
};

// Expectation of SlbPeakOnly over a random peak. A zero peak allows no
// masking and contributes h(X).
inline double SlbPeakRandom(double h_x_bits, std::span<const PeakAtom> atoms) {
  if (atoms.empty()) throw InvalidArgumentError("SlbPeakRandom: empty law");
  double total = 0.0;
  double mass = 0.0;
  for (const PeakAtom& a : atoms) {
    if (a.peak < 0.0 || !(a.prob >= 0.0)) {
      throw InvalidArgumentError("SlbPeakRandom: negative peak or mass");
    }
    mass += a.prob;
    total += a.prob * (a.peak == 0.0 ? h_x_bits : SlbPeakOnly(h_x_bits, a.peak));
  }
  if (std::abs(mass - 1.0) > kPmfTolerance) {
    throw InvalidArgumentError("SlbPeakRandom: masses must sum to 1");
  }
  return total;
}

}  // namespace smartleak

#endif  // SMARTLEAK_SLB_HPP_
