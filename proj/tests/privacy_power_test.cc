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

#include "smartleak/privacy_power.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

namespace smartleak {
namespace {

void ExpectFeasible(const Pmf& p_x, const PpfResult& r, double p_bar,
                    int p_hat) {
  for (std::size_t x = 0; x < p_x.size(); ++x) {
    for (std::size_t y = 0; y < p_x.size(); ++y) {
      const bool inside = y <= x && static_cast<int>(x - y) <= p_hat;
      if (!inside) {
        EXPECT_EQ(r.channel(x, y), 0.0) << x << "," << y;
      }
    }
  }
  EXPECT_LE(ExpectedBatteryDraw(p_x, r.channel), p_bar + 1e-12);
  EXPECT_NEAR(r.achieved_avg_draw, ExpectedBatteryDraw(p_x, r.channel), 1e-12);
  EXPECT_NEAR(r.leakage_bits, MutualInformation(p_x, r.channel), 1e-12);
}

TEST(PpfTest, NoRenewableEnergyForcesFullLeakage) {
  const Pmf p = Pmf::Uniform(3);
  for (int p_hat : {0, 1, 2}) {
    const PpfResult r = Ppf(p, 0.0, p_hat);
    EXPECT_NEAR(r.leakage_bits, std::log2(3.0), 1e-12);
    EXPECT_TRUE(r.converged);
  }
}

TEST(PpfTest, FullMaskingOnceAverageCoversDemand) {
  for (double p_bar : {0.5, 0.7, 3.0}) {
    const PpfResult r = Ppf(Pmf::Uniform(2), p_bar, 1);
    EXPECT_NEAR(r.leakage_bits, 0.0, 1e-7);
    ExpectFeasible(Pmf::Uniform(2), r, p_bar, 1);
  }
}

TEST(PpfTest, BinaryQuarterDraw) {
  const PpfResult r = Ppf(Pmf::Uniform(2), 0.25, 1);
  EXPECT_NEAR(r.leakage_bits, 0.311278, 1e-6);
  EXPECT_NEAR(r.leakage_bits, oracle::BruteForcePpf({0.5, 0.5}, 0.25, 1), 1e-6);
  EXPECT_TRUE(r.converged);
  ExpectFeasible(Pmf::Uniform(2), r, 0.25, 1);
}

TEST(PpfTest, MatchesBinaryClosedFormOnGrid) {
  for (double q : {0.2, 0.5, 0.7}) {
    for (int i = 0; i <= 20; ++i) {
      const double p_e = 0.05 * i;
      const PpfResult r = Ppf(Pmf::Bernoulli(q), p_e, 1);
      EXPECT_NEAR(r.leakage_bits, oracle::BinaryInfinite(p_e, q), 1e-6)
          << "q=" << q << " p_e=" << p_e;
      ExpectFeasible(Pmf::Bernoulli(q), r, p_e, 1);
    }
  }
}

TEST(PpfTest, AgreesWithLatticeSearchOnSmallAlphabets) {
  struct Case {
    std::vector<double> p_x;
    double p_bar;
    int p_hat;
  };
  const std::vector<Case> cases = {
      {{0.3, 0.7}, 0.2, 1},         {{0.6, 0.4}, 0.1, 1},
      {{0.2, 0.5, 0.3}, 0.3, 1},    {{0.2, 0.5, 0.3}, 0.6, 1},
      {{1 / 3.0, 1 / 3.0, 1 / 3.0}, 0.5, 2},
      {{0.5, 0.2, 0.3}, 0.25, 2},   {{0.1, 0.3, 0.6}, 1.0, 2},
  };
  for (const Case& c : cases) {
    const Pmf p_x(c.p_x);
    const PpfResult r = Ppf(p_x, c.p_bar, c.p_hat);
    const double reference = oracle::BruteForcePpf(c.p_x, c.p_bar, c.p_hat);
    EXPECT_NEAR(r.leakage_bits, reference, 1e-4)
        << "p_bar=" << c.p_bar << " p_hat=" << c.p_hat;
    // The lattice only reaches feasible channels, so it cannot beat the
    // true minimum by more than rounding.
    EXPECT_LE(r.leakage_bits, reference + 1e-7);
    ExpectFeasible(p_x, r, c.p_bar, c.p_hat);
  }
}

TEST(PpfTest, AverageConstraintSaturatesAtMeanDemand) {
  const Pmf p_x({0.2, 0.3, 0.5});
  for (int p_hat : {1, 2}) {
    const double at_mean = Ppf(p_x, p_x.Mean(), p_hat).leakage_bits;
    EXPECT_NEAR(Ppf(p_x, p_x.Mean() + 0.7, p_hat).leakage_bits, at_mean, 1e-9);
  }
}

TEST(PpfTest, PeakOneCannotHideTwoQuanta) {
  // With P_hat = 1 the letter 2 can at best be mapped onto 1.
  const Pmf p_x({0.0, 0.0, 1.0});
  EXPECT_NEAR(Ppf(p_x, 5.0, 1).leakage_bits, 0.0, 1e-9);
  const Pmf q({0.5, 0.0, 0.5});
  EXPECT_GT(Ppf(q, 5.0, 1).leakage_bits, 0.5);
  EXPECT_NEAR(Ppf(q, 5.0, 2).leakage_bits, 0.0, 1e-7);
}

TEST(PpfTest, NonIncreasingInPeak) {
  const Pmf p_x({0.1, 0.2, 0.3, 0.4});
  for (double p_bar : {0.3, 0.8, 1.5}) {
    double prev = Ppf(p_x, p_bar, 0).leakage_bits;
    for (int p_hat = 1; p_hat <= 3; ++p_hat) {
      const double v = Ppf(p_x, p_bar, p_hat).leakage_bits;
      EXPECT_LE(v, prev + 1e-8);
      prev = v;
    }
  }
}

TEST(PpfTest, LeakageStaysWithinEntropy) {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 4;
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) total += (v = exp1(rng));
    for (double& v : p) v /= total;
    const Pmf p_x(p);
    const double p_bar = unit(rng) * p_x.Mean();
    const int p_hat = 1 + trial % (k - 1);
    const PpfResult r = Ppf(p_x, p_bar, p_hat);
    EXPECT_GE(r.leakage_bits, 0.0);
    EXPECT_LE(r.leakage_bits, Entropy(p_x) + 1e-9);
    ExpectFeasible(p_x, r, p_bar, p_hat);
  }
}

TEST(PpfTest, BackoffTightensTheBudget) {
  PpfOptions opts;
  opts.backoff = 0.05;
  const PpfResult r = Ppf(Pmf::Uniform(2), 0.3, 1, opts);
  EXPECT_LE(r.achieved_avg_draw, 0.25 + 1e-12);
  EXPECT_NEAR(r.leakage_bits, oracle::BinaryInfinite(0.25, 0.5), 1e-6);
}

TEST(PpfTest, InvalidArguments) {
  EXPECT_THROW(Ppf(Pmf::Uniform(2), -0.1, 1), InvalidArgumentError);
  EXPECT_THROW(Ppf(Pmf::Uniform(2), 0.1, -1), InvalidArgumentError);
  PpfOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(Ppf(Pmf::Uniform(2), 0.1, 1, bad), InvalidArgumentError);
}

TEST(PpfCurveTest, EndpointsAndMonotonicity) {
  const Pmf p_x({0.2, 0.5, 0.3});
  const std::vector<double> ends = {0.0, p_x.Mean()};
  const auto curve = PpfCurve(p_x, 2, ends);
  EXPECT_NEAR(curve[0].leakage_bits, Entropy(p_x), 1e-12);
  EXPECT_NEAR(curve[1].leakage_bits, 0.0, 1e-7);

  const std::vector<double> grid = {0.1, 0.2, 0.3};
  const auto binary = PpfCurve(Pmf::Uniform(2), 1, grid);
  EXPECT_GT(binary[0].leakage_bits, binary[1].leakage_bits);
  EXPECT_GT(binary[1].leakage_bits, binary[2].leakage_bits);
  for (const auto& pt : binary) {
    EXPECT_NEAR(pt.leakage_bits, oracle::BinaryInfinite(pt.p_bar, 0.5), 1e-6);
  }
}

TEST(PpfCurveTest, ThreadedMatchesSerial) {
  const Pmf p_x({0.1, 0.4, 0.2, 0.3});
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.15 * i);
  const auto serial = PpfCurve(p_x, 2, grid, {}, 1);
  const auto threaded = PpfCurve(p_x, 2, grid, {}, 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(serial[i].leakage_bits, threaded[i].leakage_bits);
  }
}

TEST(PpfCurveTest, RejectsUnsortedGrid) {
  const std::vector<double> grid = {0.3, 0.1};
  EXPECT_THROW(PpfCurve(Pmf::Uniform(2), 1, grid), InvalidArgumentError);
}

TEST(PpfCurveTest, MidpointConvexOnRandomInstances) {
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> exp1(1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + trial % 2;
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) total += (v = exp1(rng));
    for (double& v : p) v /= total;
    const Pmf p_x(p);
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(p_x.Mean() * i / 12.0);
    const auto c = PpfCurve(p_x, k - 1, grid);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      EXPECT_LE(c[i].leakage_bits, c[i - 1].leakage_bits + 1e-6);
      EXPECT_LE(c[i].leakage_bits,
                0.5 * (c[i - 1].leakage_bits + c[i + 1].leakage_bits) + 1e-6);
    }
  }
}

TEST(PpfZeroKnownTest, Examples) {
  const Pmf p_x({0.2, 0.5, 0.3});
  EXPECT_NEAR(PpfZeroKnown(p_x, Pmf::PointMass(0, 3)), Entropy(p_x), 1e-12);
  EXPECT_NEAR(PpfZeroKnown(p_x, Pmf::PointMass(2, 3)), 0.0, 1e-7);
  EXPECT_NEAR(PpfZeroKnown(Pmf::Uniform(2), Pmf::Bernoulli(0.5)), 0.5, 1e-9);
  // Half the time nothing, half the time everything.
  EXPECT_NEAR(PpfZeroKnown(p_x, Pmf({0.5, 0.0, 0.5})), 0.5 * Entropy(p_x), 1e-7);
  // A peak cap of 1 leaves letter 2 partly exposed.
  EXPECT_GT(PpfZeroKnown(p_x, Pmf::PointMass(2, 3), 1), 0.1);
}

}  // namespace
}  // namespace smartleak
