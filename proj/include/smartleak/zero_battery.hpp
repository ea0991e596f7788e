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

// No-storage systems. The renewable energy E_t acts as a stochastic peak
// constraint 0 <= X_t - Y_t <= E_t. When only the energy management unit
// sees E_t, the utility provider observes the channel p(y|x) induced by
// averaging the state-dependent kernels p(y|x,e) over p_E.

#ifndef SMARTLEAK_ZERO_BATTERY_HPP_
#define SMARTLEAK_ZERO_BATTERY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "smartleak/core.hpp"
#include "smartleak/parallel.hpp"
#include "smartleak/privacy_power.hpp"

namespace smartleak {

// One kernel p(y|x,e) per renewable state e.
struct StateChannel {
  std::vector<ConditionalPmf> kernels;

  // p(y|x) = sum_e p_E(e) p(y|x,e).
  ConditionalPmf Induced(const Pmf& p_e) const {
    if (kernels.size() != p_e.size()) {
      throw InvalidArgumentError("StateChannel: kernel count != |E|");
    }
    const std::size_t k = kernels.front().size();
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
    for (std::size_t e = 0; e < kernels.size(); ++e)
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y)
          rows[x][y] += p_e[e] * kernels[e](x, y);
    return ConditionalPmf(std::move(rows));
  }

  // True when every kernel puts mass only on x - min(e, cap) <= y <= x.
  bool IsFeasible(std::optional<int> peak_cap = std::nullopt) const {
    for (std::size_t e = 0; e < kernels.size(); ++e) {
      const int reach =
          peak_cap ? std::min(static_cast<int>(e), *peak_cap) : static_cast<int>(e);
      const auto& kernel = kernels[e];
      for (std::size_t x = 0; x < kernel.size(); ++x)
        for (std::size_t y = 0; y < kernel.size(); ++y) {
          const bool inside = y <= x && static_cast<int>(x - y) <= reach;
          if (!inside && kernel(x, y) != 0.0) return false;
        }
    }
    return true;
  }
};

struct ZeroBatteryOptions {
  // Stop when the Frank-Wolfe duality gap (bits) falls below tol.
  double tol = 1e-8;
  int max_iterations = 20000;
  int restarts = 5;
  double step_scale = 0.5;
  std::uint64_t seed = 1;
  std::optional<int> peak_cap;
  int threads = 1;
};

struct ZeroBatteryResult {
  double leakage_bits = 0.0;
  StateChannel channel;
  int iterations = 0;
  bool converged = false;
};

namespace internal {

struct MirrorDescentRun {
  double leakage = 0.0;
  std::vector<Matrix> kernels;
  int iterations = 0;
  bool converged = false;
};

inline int Reach(int e, const std::optional<int>& cap) {
  return cap ? std::min(e, *cap) : e;
}

// Exponentiated-gradient descent over the product of per-(x, e) simplices.
// Each block's gradient p_E(e) p(x) log2(W(y|x)/q(y)) is divided by its
// weight p_E(e) p(x), i.e. block-wise step sizes step_scale / sqrt(t).
inline MirrorDescentRun RunMirrorDescent(const Pmf& p_x, const Pmf& p_e,
                                         std::vector<Matrix> kernels,
                                         const ZeroBatteryOptions& options) {
  const int kx = static_cast<int>(p_x.size());
  const int ke = static_cast<int>(p_e.size());
  Matrix induced(kx, std::vector<double>(kx, 0.0));
  std::vector<double> q(kx, 0.0);
  Matrix grad(kx, std::vector<double>(kx, 0.0));

  auto refresh = [&](const std::vector<Matrix>& ks) {
    for (auto& row : induced) std::fill(row.begin(), row.end(), 0.0);
    for (int e = 0; e < ke; ++e)
      for (int x = 0; x < kx; ++x)
        for (int y = 0; y < kx; ++y) induced[x][y] += p_e[e] * ks[e][x][y];
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 0; x < kx; ++x)
      for (int y = 0; y < kx; ++y) q[y] += p_x[x] * induced[x][y];
    for (int x = 0; x < kx; ++x)
      for (int y = 0; y < kx; ++y)
        grad[x][y] = induced[x][y] > 0.0 && q[y] > 0.0
                         ? std::log2(induced[x][y] / q[y])
                         : -1e3;  // log of a vanishing ratio, finite stand-in
    return LeakageOf(p_x, induced);
  };

  MirrorDescentRun best;
  best.leakage = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= options.max_iterations; ++t) {
    const double value = refresh(kernels);
    // Frank-Wolfe gap sum_{e,x} p_E p_X (<K, g> - min_y g) over the support.
    double gap = 0.0;
    for (int e = 0; e < ke; ++e) {
      const int reach = Reach(e, options.peak_cap);
      for (int x = 0; x < kx; ++x) {
        const double w = p_e[e] * p_x[x];
        if (w == 0.0) continue;
        double inner = 0.0;
        double lowest = std::numeric_limits<double>::infinity();
        for (int y = std::max(0, x - reach); y <= x; ++y) {
          inner += kernels[e][x][y] * grad[x][y];
          lowest = std::min(lowest, grad[x][y]);
        }
        gap += w * (inner - lowest);
      }
    }
    if (value < best.leakage) {
      best.leakage = value;
      best.kernels = kernels;
    }
    best.iterations = t;
    if (gap < options.tol) {
      best.converged = true;
      break;
    }
    const double step = options.step_scale / std::sqrt(static_cast<double>(t));
    for (int e = 0; e < ke; ++e) {
      const int reach = Reach(e, options.peak_cap);
      for (int x = 0; x < kx; ++x) {
        if (p_e[e] * p_x[x] == 0.0) continue;
        const int lo = std::max(0, x - reach);
        double shift = std::numeric_limits<double>::infinity();
        for (int y = lo; y <= x; ++y) shift = std::min(shift, grad[x][y]);
        double norm = 0.0;
        for (int y = lo; y <= x; ++y) {
          kernels[e][x][y] *= std::exp(-step * (grad[x][y] - shift));
          norm += kernels[e][x][y];
        }
        for (int y = lo; y <= x; ++y) kernels[e][x][y] /= norm;
      }
    }
  }
  return best;
}

inline std::vector<Matrix> InitialKernels(int kx, int ke,
                                          const std::optional<int>& cap,
                                          std::mt19937_64* rng) {
  std::vector<Matrix> kernels(ke, Matrix(kx, std::vector<double>(kx, 0.0)));
  std::exponential_distribution<double> exp1(1.0);
  for (int e = 0; e < ke; ++e) {
    const int reach = Reach(e, cap);
    for (int x = 0; x < kx; ++x) {
      const int lo = std::max(0, x - reach);
      double norm = 0.0;
      for (int y = lo; y <= x; ++y) {
        // Strictly positive weights keep every feasible output reachable by
        // the multiplicative updates.
        const double v = rng ? 0.05 + exp1(*rng) : 1.0;
        kernels[e][x][y] = v;
        norm += v;
      }
      for (int y = lo; y <= x; ++y) kernels[e][x][y] /= norm;
    }
  }
  return kernels;
}

}  // namespace internal

// Minimum leakage I(X;Y) with no battery when the renewable state is seen
// only by the energy management unit.
inline ZeroBatteryResult SolveZeroUnknown(const Pmf& p_x, const Pmf& p_e,
                                          const ZeroBatteryOptions& options = {}) {
  if (!(options.tol > 0.0)) {
    throw InvalidArgumentError("SolveZeroUnknown: tol must be > 0");
  }
  if (options.restarts < 1) {
    throw InvalidArgumentError("SolveZeroUnknown: need at least one restart");
  }
  const int kx = static_cast<int>(p_x.size());
  const int ke = static_cast<int>(p_e.size());
  std::vector<internal::MirrorDescentRun> runs(options.restarts);
  ParallelFor(runs.size(), options.threads, [&](std::size_t r) {
    std::mt19937_64 rng(options.seed + r);
    auto init = internal::InitialKernels(kx, ke, options.peak_cap,
                                         r == 0 ? nullptr : &rng);
    runs[r] = internal::RunMirrorDescent(p_x, p_e, std::move(init), options);
  });

  ZeroBatteryResult result;
  const internal::MirrorDescentRun* best = &runs.front();
  for (const auto& run : runs) {
    result.iterations += run.iterations;
    if (run.leakage < best->leakage) best = &run;
  }
  result.leakage_bits = best->leakage;
  result.converged = best->converged;
  for (const auto& k : best->kernels) result.channel.kernels.emplace_back(k);
  return result;
}

// No battery, renewable state known to the utility provider.
inline double SolveZeroKnown(const Pmf& p_x, const Pmf& p_e,
                             std::optional<int> peak_cap = std::nullopt,
                             const PpfOptions& options = {}) {
  return PpfZeroKnown(p_x, p_e, peak_cap, options);
}

}  // namespace smartleak

#endif  // SMARTLEAK_ZERO_BATTERY_HPP_
