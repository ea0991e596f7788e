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

// The privacy-power function: the minimum single-letter leakage I(X;Y) over
// channels p(y|x) with 0 <= x - y <= P_hat and E[X - Y] <= P_bar.
//
// The problem is a rate-distortion problem with distortion d(x, y) = x - y on
// the feasible support. For a fixed Lagrange slope the Blahut-Arimoto
// iteration converges to the curve point with that slope; an outer bisection
// on the slope brackets the target draw, and the two bracketing channels are
// mixed so the returned channel meets the draw constraint exactly.

#ifndef SMARTLEAK_PRIVACY_POWER_HPP_
#define SMARTLEAK_PRIVACY_POWER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "smartleak/core.hpp"
#include "smartleak/parallel.hpp"

namespace smartleak {

struct PpfOptions {
  // Stop the inner iteration once the Lagrangian duality gap is below tol
  // (bits).
  double tol = 1e-9;
  int max_iterations = 10000;
  // Upper end of the slope search, bits per quantum.
  double max_slope = 64.0;
  int bisection_steps = 60;
  // Solve for P_bar - backoff instead of P_bar. Lets callers enforce the
  // strict inequality E[X - Y*] < P_bar needed by the best-effort policy.
  double backoff = 0.0;
};

struct PpfResult {
  double leakage_bits = 0.0;
  ConditionalPmf channel = ConditionalPmf::Identity(1);
  double achieved_avg_draw = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct CurvePoint {
  double p_bar = 0.0;
  double leakage_bits = 0.0;
  bool converged = false;
};

namespace internal {

// Dense channel with off-support entries held at exactly zero.
using Matrix = std::vector<std::vector<double>>;

struct SlopeSolution {
  Matrix channel;
  std::vector<double> q;
  double leakage = 0.0;
  double draw = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline int SupportLow(int x, int p_hat) { return std::max(0, x - p_hat); }

inline double LeakageOf(const Pmf& p_x, const Matrix& w) {
  const std::size_t k = w.size();
  std::vector<double> q(k, 0.0);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y) q[y] += p_x[x] * w[x][y];
  double mi = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    if (p_x[x] == 0.0) continue;
    for (std::size_t y = 0; y < k; ++y) {
      if (w[x][y] > 0.0) mi += p_x[x] * w[x][y] * std::log2(w[x][y] / q[y]);
    }
  }
  return std::max(mi, 0.0);
}

inline double DrawOf(const Pmf& p_x, const Matrix& w) {
  double draw = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t y = 0; y <= x; ++y)
      draw += p_x[x] * w[x][y] * static_cast<double>(x - y);
  return draw;
}

// Blahut-Arimoto at a fixed slope (bits per quantum). Works in the log
// domain so large slopes times large distortions cannot underflow the
// normalizers. `q` is the warm start for the output distribution.
inline SlopeSolution SolveAtSlope(const Pmf& p_x, int p_hat, double slope,
                                  std::vector<double> q,
                                  const PpfOptions& options) {
  const int k = static_cast<int>(p_x.size());
  const double gap_tol_nats = options.tol * std::log(2.0);
  const double slope_nats = slope * std::log(2.0);
  SlopeSolution out;
  out.channel.assign(k, std::vector<double>(k, 0.0));
  std::vector<double> log_norm(k, 0.0);
  std::vector<double> next_q(k, 0.0);
  std::vector<double> log_q(k);

  for (int it = 1; it <= options.max_iterations; ++it) {
    for (int y = 0; y < k; ++y) {
      log_q[y] = q[y] > 0.0 ? std::log(q[y])
                            : -std::numeric_limits<double>::infinity();
    }
    // Channel update Q(y|x) ~ q(y) exp(-s (x - y)) over the support.
    for (int x = 0; x < k; ++x) {
      const int lo = SupportLow(x, p_hat);
      double peak = -std::numeric_limits<double>::infinity();
      for (int y = lo; y <= x; ++y)
        peak = std::max(peak, log_q[y] - slope_nats * (x - y));
      if (!std::isfinite(peak)) {
        // Letters of zero probability may see no output mass; their row
        // never enters the objective, so pass them through unchanged.
        if (p_x[x] != 0.0) {
          throw NumericalError("SolveAtSlope: output distribution lost support");
        }
        std::fill(out.channel[x].begin(), out.channel[x].end(), 0.0);
        out.channel[x][x] = 1.0;
        log_norm[x] = 0.0;
        continue;
      }
      double norm = 0.0;
      for (int y = lo; y <= x; ++y) {
        const double v = std::exp(log_q[y] - slope_nats * (x - y) - peak);
        out.channel[x][y] = v;
        norm += v;
      }
      for (int y = lo; y <= x; ++y) out.channel[x][y] /= norm;
      log_norm[x] = peak + std::log(norm);
    }
    // Duality gap: log max_y sum_x p(x) exp(-s d(x,y)) / lambda(x).
    double max_c = 0.0;
    for (int y = 0; y < k; ++y) {
      double c = 0.0;
      const int x_hi = std::min(k - 1, y + p_hat);
      for (int x = y; x <= x_hi; ++x) {
        if (p_x[x] == 0.0) continue;
        c += p_x[x] * std::exp(-slope_nats * (x - y) - log_norm[x]);
      }
      max_c = std::max(max_c, c);
    }
    std::fill(next_q.begin(), next_q.end(), 0.0);
    for (int x = 0; x < k; ++x)
      for (int y = SupportLow(x, p_hat); y <= x; ++y)
        next_q[y] += p_x[x] * out.channel[x][y];
    q.swap(next_q);
    out.iterations = it;
    if (std::log(std::max(max_c, 1.0)) < gap_tol_nats) {
      out.converged = true;
      break;
    }
  }
  out.q = std::move(q);
  out.leakage = LeakageOf(p_x, out.channel);
  out.draw = DrawOf(p_x, out.channel);
  return out;
}

inline Matrix IdentityMatrix(std::size_t k) {
  Matrix m(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix Mix(const Matrix& a, const Matrix& b, double weight_a) {
  Matrix m = a;
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < a.size(); ++y)
      m[x][y] = weight_a * a[x][y] + (1.0 - weight_a) * b[x][y];
  return m;
}

// Row sums can drift from 1 by a few ulps after mixing; ConditionalPmf
// requires 1e-12, which this stays well within.
inline ConditionalPmf ToConditional(const Matrix& m) { return ConditionalPmf(m); }

}  // namespace internal

// Privacy-power function value and optimizing channel for demand p_x,
// average renewable draw p_bar and peak draw p_hat (quanta).
inline PpfResult Ppf(const Pmf& p_x, double p_bar, int p_hat,
                     const PpfOptions& options = {}) {
  if (!(p_bar >= 0.0) || !std::isfinite(p_bar)) {
    throw InvalidArgumentError("Ppf: P_bar must be a finite value >= 0");
  }
  if (p_hat < 0) throw InvalidArgumentError("Ppf: P_hat must be >= 0");
  if (!(options.tol > 0.0)) throw InvalidArgumentError("Ppf: tol must be > 0");
  if (options.backoff < 0.0) {
    throw InvalidArgumentError("Ppf: backoff must be >= 0");
  }
  using internal::Matrix;
  const std::size_t k = p_x.size();
  const double target = std::max(0.0, p_bar - options.backoff);

  PpfResult result;
  auto finish = [&](const Matrix& channel, int iterations, bool converged) {
    result.channel = internal::ToConditional(channel);
    result.leakage_bits = internal::LeakageOf(p_x, channel);
    result.achieved_avg_draw = internal::DrawOf(p_x, channel);
    result.iterations = iterations;
    result.converged = converged;
    return result;
  };

  if (p_hat == 0 || target == 0.0 || k == 1) {
    return finish(internal::IdentityMatrix(k), 0, true);
  }

  const std::vector<double> uniform(k, 1.0 / static_cast<double>(k));
  internal::SlopeSolution flat =
      internal::SolveAtSlope(p_x, p_hat, 0.0, uniform, options);
  int iterations = flat.iterations;
  bool converged = flat.converged;
  if (flat.draw <= target) {
    // Average constraint is slack: the unconstrained optimum is feasible.
    return finish(flat.channel, iterations, converged);
  }

  internal::SlopeSolution steep = internal::SolveAtSlope(
      p_x, p_hat, options.max_slope, uniform, options);
  iterations += steep.iterations;

  internal::SlopeSolution lo = std::move(flat);
  std::optional<internal::SlopeSolution> hi;
  double lo_slope = 0.0;
  double hi_slope = options.max_slope;
  if (steep.draw <= target) {
    hi = std::move(steep);
    for (int step = 0; step < options.bisection_steps; ++step) {
      const double mid = 0.5 * (lo_slope + hi_slope);
      internal::SlopeSolution s =
          internal::SolveAtSlope(p_x, p_hat, mid, hi->q, options);
      iterations += s.iterations;
      if (s.draw > target) {
        lo = std::move(s);
        lo_slope = mid;
      } else {
        hi = std::move(s);
        hi_slope = mid;
      }
    }
  } else {
    // Even the steepest slope overdraws; bracket with Y = X (draw 0).
    lo = std::move(steep);
  }

  // Only the two bracketing solutions enter the answer.
  converged = lo.converged && (!hi || hi->converged);
  const Matrix hi_channel = hi ? hi->channel : internal::IdentityMatrix(k);
  const double hi_draw = hi ? hi->draw : 0.0;
  double weight_lo = (target - hi_draw) / (lo.draw - hi_draw);
  weight_lo = std::clamp(weight_lo, 0.0, 1.0);
  Matrix mixed = internal::Mix(lo.channel, hi_channel, weight_lo);
  // Keep the draw constraint hard against rounding.
  for (int guard = 0; guard < 64 && internal::DrawOf(p_x, mixed) > target;
       ++guard) {
    weight_lo *= (1.0 - 1e-12);
    weight_lo -= 1e-300;
    mixed = internal::Mix(lo.channel, hi_channel, std::max(weight_lo, 0.0));
  }
  if (internal::DrawOf(p_x, mixed) > target) mixed = hi_channel;

  const double mixed_leak = internal::LeakageOf(p_x, mixed);
  const double hi_leak = internal::LeakageOf(p_x, hi_channel);
  const bool hit_target =
      std::abs(internal::DrawOf(p_x, mixed) - target) < 1e-8;
  if (hi_leak <= mixed_leak) {
    return finish(hi_channel, iterations,
                  converged && std::abs(hi_draw - target) < 1e-8);
  }
  return finish(mixed, iterations, converged && hit_target);
}

// Evaluates Ppf on an ascending grid of average-draw values.
inline std::vector<CurvePoint> PpfCurve(const Pmf& p_x, int p_hat,
                                        std::span<const double> p_bar_grid,
                                        const PpfOptions& options = {},
                                        int threads = 1) {
  if (!std::is_sorted(p_bar_grid.begin(), p_bar_grid.end())) {
    throw InvalidArgumentError("PpfCurve: grid must be sorted ascending");
  }
  std::vector<CurvePoint> curve(p_bar_grid.size());
  ParallelFor(p_bar_grid.size(), threads, [&](std::size_t i) {
    const PpfResult r = Ppf(p_x, p_bar_grid[i], p_hat, options);
    curve[i] = {p_bar_grid[i], r.leakage_bits, r.converged};
  });
  return curve;
}

// Zero-battery leakage when the renewable state is also known to the utility
// provider: E_E[Ppf(p_x, E, E)]. An optional cap limits the peak draw to
// min(E, cap).
inline double PpfZeroKnown(const Pmf& p_x, const Pmf& p_e,
                           std::optional<int> peak_cap = std::nullopt,
                           const PpfOptions& options = {}) {
  double total = 0.0;
  for (std::size_t e = 0; e < p_e.size(); ++e) {
    if (p_e[e] == 0.0) continue;
    const int peak =
        peak_cap ? std::min(static_cast<int>(e), *peak_cap) : static_cast<int>(e);
    total += p_e[e] * Ppf(p_x, static_cast<double>(e), peak, options).leakage_bits;
  }
  return total;
}

}  // namespace smartleak

#endif  // SMARTLEAK_PRIVACY_POWER_HPP_
