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

#include "smartleak/leakage_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "smartleak/privacy_power.hpp"

namespace smartleak {
namespace {

ConditionalPmf DrawWithProbability(double a) {
  return ConditionalPmf({{1.0, 0.0}, {a, 1.0 - a}});
}

TEST(ForwardFilterTest, BeliefStaysNormalized) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int s = 4;
  ForwardFilter f(s);
  std::vector<double> kernel(s * s);
  for (int step = 0; step < 500; ++step) {
    for (double& v : kernel) v = 0.3 * unit(rng);
    f.Observe(kernel.data());
    double total = 0.0;
    for (double v : f.belief()) total += v;
    ASSERT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(ForwardFilterTest, LikelihoodMatchesMatrixProduct) {
  // Two states; two fixed substochastic kernels applied alternately.
  const std::vector<double> k0 = {0.5, 0.1, 0.2, 0.3};
  const std::vector<double> k1 = {0.1, 0.2, 0.05, 0.4};
  ForwardFilter f(2, 1);
  std::vector<double> v = {0.0, 1.0};
  for (int t = 0; t < 40; ++t) {
    const auto& k = t % 3 == 0 ? k1 : k0;
    f.Observe(k.data());
    const std::vector<double> w = {v[0] * k[0] + v[1] * k[2],
                                   v[0] * k[1] + v[1] * k[3]};
    v = w;
  }
  EXPECT_NEAR(f.Log2Likelihood(), std::log2(v[0] + v[1]), 1e-10);
}

TEST(ForwardFilterTest, LongRunsDoNotUnderflow) {
  const std::vector<double> k = {1e-3};
  ForwardFilter f(1);
  for (int t = 0; t < 100000; ++t) f.Observe(k.data());
  EXPECT_NEAR(f.Log2Likelihood(), 100000 * std::log2(1e-3), 1e-6);
}

TEST(ForwardFilterTest, ZeroProbabilityObservationIsLoud) {
  const std::vector<double> k = {0.0, 0.0, 0.0, 0.0};
  ForwardFilter f(2);
  EXPECT_THROW(f.Observe(k.data()), NumericalError);
}

TEST(EstimateLeakageTest, ZeroBatteryMatchesClosedForm) {
  SimOptions opts{200000, 4, 1, 1};
  for (auto [p_e, p_v] : {std::pair{0.5, 1.0}, {0.3, 0.6}, {0.8, 0.9}}) {
    const GridModel m = GridModel::Binary(0.5, p_e, BatteryCapacity::Finite(0));
    const LeakageEstimate est = EstimateLeakage(m, BatteryIndependent{p_v}, opts);
    const double truth = oracle::BinaryZeroUnknown(p_e, p_v, 0.5);
    EXPECT_LE(std::abs(est.bits_per_slot - truth), 3 * est.std_error + 1e-3)
        << "p_e=" << p_e << " p_v=" << p_v;
  }
}

TEST(EstimateLeakageTest, NoMaskingLeaksEverything) {
  SimOptions opts{100000, 4, 1, 1};
  const double h = oracle::H2(0.3);
  for (const auto& [m, p] :
       {std::pair{GridModel::Binary(0.3, 0.5, BatteryCapacity::Finite(2)), 0.0},
        std::pair{GridModel::Binary(0.3, 0.0, BatteryCapacity::Finite(2)), 0.8}}) {
    const LeakageEstimate est = EstimateLeakage(m, BatteryIndependent{p}, opts);
    EXPECT_NEAR(est.hy_given_x_rate, 0.0, 1e-12);
    EXPECT_LE(std::abs(est.bits_per_slot - h), 3 * est.std_error + 1e-9);
  }
}

TEST(EstimateLeakageTest, InvariantsAndDeterminism) {
  const GridModel m(Pmf::Uniform(5), Pmf::Binomial(4, 0.3),
                    BatteryCapacity::Finite(2), 4);
  const Policy p = ThreeLevel{{0.3, 0.6, 0.8, 0.4, 0.2, 0.1}};
  SimOptions serial{20000, 5, 11, 1};
  SimOptions threaded = serial;
  threaded.threads = 3;
  const LeakageEstimate a = EstimateLeakage(m, p, serial);
  const LeakageEstimate b = EstimateLeakage(m, p, threaded);
  EXPECT_EQ(a.bits_per_slot, b.bits_per_slot);
  EXPECT_EQ(a.std_error, b.std_error);
  ASSERT_EQ(a.records.size(), 5u);
  EXPECT_EQ(a.records[0].seed, 11u);
  EXPECT_EQ(a.records[4].seed, 15u);
  EXPECT_NEAR(a.bits_per_slot, a.hy_rate - a.hy_given_x_rate, 1e-12);
  EXPECT_GE(a.bits_per_slot, -3 * a.std_error);
  EXPECT_LE(a.bits_per_slot, std::log2(5.0) + 3 * a.std_error);
}

TEST(EstimateLeakageTest, SingleSeedHasNoStandardError) {
  const GridModel m = GridModel::Binary(0.5, 0.5, BatteryCapacity::Finite(1));
  const LeakageEstimate est = EstimateLeakage(m, BatteryIndependent{0.5}, {1000, 1, 1, 1});
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(EstimateLeakageTest, Rejections) {
  const GridModel fin = GridModel::Binary(0.5, 0.5, BatteryCapacity::Finite(1));
  EXPECT_THROW(EstimateLeakage(fin, BatteryIndependent{0.5}, {0, 1, 1, 1}),
               InvalidArgumentError);
  const GridModel inf = GridModel::Binary(0.5, 0.5, BatteryCapacity::Infinite());
  EXPECT_THROW(EstimateLeakage(inf, BatteryIndependent{0.5}, {10, 1, 1, 1}),
               InvalidArgumentError);
}

TEST(BruteForceRateTest, SingleSlotIsTheSingleLetterProblem) {
  const GridModel m = GridModel::Binary(0.5, 0.5, BatteryCapacity::Finite(0));
  EXPECT_NEAR(BruteForceRate(m, BatteryIndependent{1.0}, 1),
              oracle::BinaryZeroUnknown(0.5, 1.0, 0.5), 1e-12);
  EXPECT_NEAR(BruteForceRate(m, BatteryIndependent{0.0}, 1), 1.0, 1e-12);
}

TEST(BruteForceRateTest, MatchesDirectEnumeration) {
  for (int cap : {0, 1, 2})
    for (int n : {2, 4, 6}) {
      std::vector<double> p_v(cap + 1);
      for (int b = 0; b <= cap; ++b) p_v[b] = 0.4 + 0.2 * b;
      const GridModel m =
          GridModel::Binary(0.4, 0.6, BatteryCapacity::Finite(cap));
      EXPECT_NEAR(BruteForceRate(m, BatteryConditioned{p_v}, n),
                  oracle::BinaryMaskingRate(0.4, 0.6, p_v, n), 1e-12)
          << "cap=" << cap << " n=" << n;
    }
}

TEST(BruteForceRateTest, UnboundedBatteryAndTimeVaryingPolicies) {
  const GridModel m = GridModel::Binary(0.5, 0.5, BatteryCapacity::Infinite());
  const ConditionalPmf w = Ppf(m.p_x, 0.5, 1).channel;
  // Storing through the whole horizon reveals everything.
  EXPECT_NEAR(BruteForceRate(m, StoreAndHide{5, w}, 5), 1.0, 1e-12);
  const double stored = BruteForceRate(m, StoreAndHide{2, w}, 5);
  const double eager = BruteForceRate(m, BestEffort{w}, 5);
  EXPECT_GT(stored, 0.0);
  EXPECT_LT(stored, 1.0);
  EXPECT_GE(eager, 0.0);
  EXPECT_LT(eager, 1.0);
}

TEST(BruteForceRateTest, BudgetExceeded) {
  const GridModel m = GridModel::Binary(0.5, 0.5, BatteryCapacity::Finite(1));
  EXPECT_THROW(BruteForceRate(m, BatteryIndependent{0.5}, 12, 1e6),
               BudgetExceededError);
}

TEST(EstimateLeakageTest, ShortHorizonMeanMatchesEnumeration) {
  const GridModel m = GridModel::Binary(0.5, 0.5, BatteryCapacity::Finite(1));
  const double exact = BruteForceRate(m, BatteryIndependent{0.7}, 6);
  const LeakageEstimate est =
      EstimateLeakage(m, BatteryIndependent{0.7}, {6, 40000, 1, 1});
  EXPECT_LE(std::abs(est.bits_per_slot - exact), 3 * est.std_error);
}

TEST(OutageExperimentTest, IdentityChannelNeverFails) {
  const GridModel m = GridModel::Binary(0.5, 0.25, BatteryCapacity::Infinite());
  const OutageResult r =
      OutageExperiment(m, ConditionalPmf::Identity(2), {10000, 2, 1, 1});
  EXPECT_EQ(r.fraction, 0.0);
}

TEST(OutageExperimentTest, FractionShrinksWithHorizon) {
  const GridModel m = GridModel::Binary(0.5, 0.25, BatteryCapacity::Infinite());
  const ConditionalPmf w = DrawWithProbability(0.4);
  EXPECT_NEAR(ExpectedChannelDraw(m.p_x, w), 0.2, 1e-15);
  double prev = 1.0;
  for (std::int64_t n : {1000, 10000, 100000}) {
    const OutageResult r = OutageExperiment(m, w, {n, 8, 1, 1});
    EXPECT_LE(r.fraction, prev + 3 * r.std_error);
    prev = r.fraction;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(OutageExperimentTest, Preconditions) {
  const GridModel m = GridModel::Binary(0.5, 0.15, BatteryCapacity::Infinite());
  EXPECT_THROW(OutageExperiment(m, DrawWithProbability(0.4), {100, 1, 1, 1}),
               InvalidArgumentError);
  const GridModel fin = GridModel::Binary(0.5, 0.25, BatteryCapacity::Finite(3));
  EXPECT_THROW(OutageExperiment(fin, DrawWithProbability(0.4), {100, 1, 1, 1}),
               InvalidArgumentError);
}

TEST(RandomWalkTest, RootMatchesBinaryClosedForm) {
  // Q in {-1, 0, 1}: p1 z^2 + (p0 - 1) z + p_-1 = 0 has roots 1 and p_-1/p1.
  const double q = 0.5, p_e = 0.25, a = 0.3;
  const GridModel m = GridModel::Binary(q, p_e, BatteryCapacity::Infinite());
  const auto law = IncrementLaw(m, DrawWithProbability(a));
  const double p_up = p_e * (1 - q * a);
  const double p_down = (1 - p_e) * q * a;
  EXPECT_NEAR(law.at(1), p_up, 1e-15);
  EXPECT_NEAR(law.at(-1), p_down, 1e-15);
  EXPECT_NEAR(NegativeMgfRoot(law), std::log(p_down / p_up), 1e-12);
}

TEST(RandomWalkTest, NonNegativeIncrementsNeverCross) {
  const GridModel m(Pmf({0.5, 0.5}), Pmf({0.0, 1.0}),
                    BatteryCapacity::Infinite(), 1);
  const WalkResult r = RandomWalkExperiment(m, ConditionalPmf::Identity(2), 50,
                                            500, 200, 3);
  EXPECT_EQ(r.crossing_fraction, 0.0);
  EXPECT_EQ(r.wald_bound, 0.0);
}

TEST(RandomWalkTest, BoundSquaresWhenStorageDoubles) {
  const GridModel m = GridModel::Binary(0.5, 0.25, BatteryCapacity::Infinite());
  const ConditionalPmf w = DrawWithProbability(0.4);
  const WalkResult one = RandomWalkExperiment(m, w, 10, 100, 10, 1);
  const WalkResult two = RandomWalkExperiment(m, w, 20, 100, 10, 1);
  EXPECT_NEAR(two.wald_bound, one.wald_bound * one.wald_bound, 1e-14);
}

TEST(RandomWalkTest, EmpiricalCrossingBelowBound) {
  // E[Q] = 0.25 - 0.5 a = 0.05 with a = 0.4.
  const GridModel m = GridModel::Binary(0.5, 0.25, BatteryCapacity::Infinite());
  const WalkResult r =
      RandomWalkExperiment(m, DrawWithProbability(0.4), 200, 5000, 2000, 5);
  EXPECT_NEAR(r.mean_q, 0.05, 1e-12);
  EXPECT_NEAR(r.threshold, -50.0, 1e-12);
  EXPECT_LE(r.crossing_fraction, r.wald_bound + 3 * r.std_error);
}

TEST(RandomWalkTest, NonPositiveDriftIsRejected) {
  const GridModel m = GridModel::Binary(0.5, 0.25, BatteryCapacity::Infinite());
  EXPECT_THROW(RandomWalkExperiment(m, DrawWithProbability(0.5), 10, 10, 10),
               NumericalError);
  EXPECT_THROW(RandomWalkExperiment(m, DrawWithProbability(0.1), -1, 10, 10),
               InvalidArgumentError);
}

}  // namespace
}  // namespace smartleak
