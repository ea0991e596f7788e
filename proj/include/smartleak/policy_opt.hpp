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

// Searches over policy parameters against simulated leakage.
//
// All evaluations inside one search share the same seed list, so every
// candidate is scored on identical demand/renewable/uniform streams (common
// random numbers). Differences between candidates are then much less noisy
// than the per-candidate standard errors suggest.

#ifndef SMARTLEAK_POLICY_OPT_HPP_
#define SMARTLEAK_POLICY_OPT_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "smartleak/core.hpp"
#include "smartleak/leakage_sim.hpp"
#include "smartleak/parallel.hpp"
#include "smartleak/policies.hpp"
#include "smartleak/random.hpp"

namespace smartleak {

struct ScanPoint {
  double p_v = 0.0;
  double leakage = 0.0;
  double std_error = 0.0;
};

struct ScanResult {
  double best_p_v = 0.0;
  double best_leakage = 0.0;
  double best_std_error = 0.0;
  std::vector<ScanPoint> curve;
};

// Grid {0, step, 2 step, ..., 1}; 1 is always included.
inline std::vector<double> UnitGrid(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw InvalidArgumentError("UnitGrid: step must lie in (0, 1]");
  }
  std::vector<double> grid;
  const auto count = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int i = 0; i <= count; ++i) grid.push_back(std::min(1.0, i * step));
  if (grid.back() < 1.0) grid.push_back(1.0);
  return grid;
}

// Battery-independent policy: evaluate every p_v on the grid and return the
// minimizer. Ties go to the larger p_v.
inline ScanResult ScanPv(const GridModel& model, double grid_step,
                         const SimOptions& sim) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw InvalidArgumentError("ScanPv: grid_step must lie in (0, 0.5]");
  }
  const std::vector<double> grid = UnitGrid(grid_step);
  ScanResult result;
  result.curve.resize(grid.size());
  SimOptions inner = sim;
  inner.threads = 1;
  ParallelFor(grid.size(), sim.threads, [&](std::size_t i) {
    const LeakageEstimate est =
        EstimateLeakage(model, BatteryIndependent{grid[i]}, inner);
    result.curve[i] = {grid[i], est.bits_per_slot, est.std_error};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (result.curve[i].leakage <= result.curve[best].leakage) best = i;
  result.best_p_v = result.curve[best].p_v;
  result.best_leakage = result.curve[best].leakage;
  result.best_std_error = result.curve[best].std_error;
  return result;
}

struct SgdOptions {
  int probes = 16;
  double radius = 0.05;
  double learning_rate = 0.2;
  double stop_threshold = 1e-3;
  int max_iterations = 200;
  // Seeds the perturbation draws, independent of the simulation seeds.
  std::uint64_t perturbation_seed = 7;
};

struct SgdTraceRow {
  int iteration = 0;
  std::vector<double> p_v;
  double leakage = 0.0;
  double std_error = 0.0;
  double best_leakage = 0.0;
};

struct SgdResult {
  std::vector<double> p_v;
  double leakage = 0.0;
  double std_error = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<SgdTraceRow> trace;
};

namespace internal {

// Least-squares gradient g minimizing sum_k (d_k . g - delta_k)^2, with a
// tiny ridge so coordinates that never moved (clamped at a bound) get g = 0.
inline std::vector<double> FitGradient(
    const std::vector<std::vector<double>>& displacements,
    const std::vector<double>& deltas) {
  const Eigen::Index rows = static_cast<Eigen::Index>(displacements.size());
  const Eigen::Index dim = static_cast<Eigen::Index>(displacements.front().size());
  Eigen::MatrixXd a(rows, dim);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = displacements[i][j];
    b(i) = deltas[i];
  }
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += 1e-12;
  const Eigen::VectorXd g = normal.ldlt().solve(a.transpose() * b);
  return std::vector<double>(g.data(), g.data() + dim);
}

}  // namespace internal

// Battery-conditioned policy: finite-difference stochastic gradient descent
// on the per-SOC masking probabilities with box projection onto [0, 1].
inline SgdResult SgdBatteryConditioned(const GridModel& model,
                                       std::vector<double> init,
                                       const SgdOptions& options,
                                       const SimOptions& sim) {
  if (model.b_max.is_infinite() ||
      static_cast<std::int64_t>(init.size()) != model.b_max.quanta() + 1) {
    throw InvalidArgumentError("SgdBatteryConditioned: init needs B_max + 1 entries");
  }
  for (double v : init) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgumentError("SgdBatteryConditioned: init outside [0, 1]");
    }
  }
  if (options.probes < 1 || !(options.radius > 0.0)) {
    throw InvalidArgumentError("SgdBatteryConditioned: bad probe settings");
  }
  SimOptions inner = sim;
  inner.threads = 1;
  auto evaluate = [&](const std::vector<double>& p_v) {
    return EstimateLeakage(model, BatteryConditioned{p_v}, inner);
  };
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

  const std::size_t dim = init.size();
  std::vector<double> theta = std::move(init);
  LeakageEstimate current = evaluate(theta);
  SgdResult result;
  result.p_v = theta;
  result.leakage = current.bits_per_slot;
  result.std_error = current.std_error;
  result.trace.push_back({0, theta, current.bits_per_slot, current.std_error,
                          result.leakage});

  RandomStream rng(options.perturbation_seed);
  std::vector<std::vector<double>> probes(options.probes,
                                          std::vector<double>(dim));
  std::vector<std::vector<double>> displacements(options.probes,
                                                 std::vector<double>(dim));
  std::vector<double> deltas(options.probes);
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (int k = 0; k < options.probes; ++k)
      for (std::size_t j = 0; j < dim; ++j) {
        const double u = rng.Uniform();
        probes[k][j] = clamp01(theta[j] + options.radius * (2.0 * u - 1.0));
        displacements[k][j] = probes[k][j] - theta[j];
      }
    ParallelFor(probes.size(), sim.threads, [&](std::size_t k) {
      deltas[k] = evaluate(probes[k]).bits_per_slot - current.bits_per_slot;
    });
    const std::vector<double> grad = internal::FitGradient(displacements, deltas);
    std::vector<double> next(dim);
    for (std::size_t j = 0; j < dim; ++j)
      next[j] = clamp01(theta[j] - options.learning_rate * grad[j]);
    const LeakageEstimate next_est = evaluate(next);
    if (next_est.bits_per_slot < result.leakage) {
      result.p_v = next;
      result.leakage = next_est.bits_per_slot;
      result.std_error = next_est.std_error;
    }
    result.iterations = it;
    result.trace.push_back(
        {it, next, next_est.bits_per_slot, next_est.std_error, result.leakage});
    const double change = std::abs(current.bits_per_slot - next_est.bits_per_slot);
    theta = std::move(next);
    current = next_est;
    if (change < options.stop_threshold) {
      result.converged = true;
      break;
    }
  }
  return result;
}

struct ThreeLevelResult {
  std::array<double, 6> p{};
  double leakage = 0.0;
  double std_error = 0.0;
  int evaluated = 0;
};

// Exhaustive grid search over (p_i, p_{i+3}) pairs with p_i + p_{i+3} <= 1.
inline ThreeLevelResult SearchThreeLevel(const GridModel& model,
                                         double grid_step,
                                         const SimOptions& sim) {
  const double cells = 1.0 / grid_step;
  if (!(grid_step > 0.0) || std::abs(cells - std::round(cells)) > 1e-9) {
    throw InvalidArgumentError("SearchThreeLevel: grid_step must divide 1");
  }
  const int steps = static_cast<int>(std::round(cells));
  std::vector<std::array<double, 2>> pairs;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; i + j <= steps; ++j)
      pairs.push_back({static_cast<double>(i) / steps, static_cast<double>(j) / steps});

  const std::size_t m = pairs.size();
  std::vector<ThreeLevel> candidates;
  candidates.reserve(m * m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        candidates.push_back(ThreeLevel{{pairs[a][0], pairs[b][0], pairs[c][0],
                                         pairs[a][1], pairs[b][1], pairs[c][1]}});

  std::vector<LeakageEstimate> scores(candidates.size());
  SimOptions inner = sim;
  inner.threads = 1;
  ParallelFor(candidates.size(), sim.threads, [&](std::size_t i) {
    scores[i] = EstimateLeakage(model, candidates[i], inner);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i].bits_per_slot < scores[best].bits_per_slot) best = i;
  ThreeLevelResult result;
  result.p = candidates[best].p;
  result.leakage = scores[best].bits_per_slot;
  result.std_error = scores[best].std_error;
  result.evaluated = static_cast<int>(candidates.size());
  return result;
}

}  // namespace smartleak

#endif  // SMARTLEAK_POLICY_OPT_HPP_
