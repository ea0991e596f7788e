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

// Reference computations used only by tests. Nothing here calls into the
// library's solvers; they are written from the problem definitions so that
// agreement is evidence, not tautology.

#ifndef SMARTLEAK_TESTS_ORACLES_HPP_
#define SMARTLEAK_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

namespace oracle {

inline double Plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline double H2(double p) { return Plogp(p) + Plogp(1.0 - p); }

inline double Entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h += Plogp(v);
  return h;
}

// Infinite-battery binary leakage.
inline double BinaryInfinite(double p_e, double q_x) {
  if (p_e > q_x) return 0.0;
  // Plogp(v) = -v log2 v, so the signs read flipped.
  return Plogp(q_x) - Plogp(p_e) + Plogp(1.0 - q_x + p_e);
}

// Zero battery, renewable state hidden: masks with probability p_v.
inline double BinaryZeroUnknown(double p_e, double p_v, double q_x) {
  return H2(1.0 - q_x + q_x * p_e * p_v) - q_x * H2(p_e * p_v);
}

// Zero battery, renewable state visible to the observer.
inline double BinaryZeroKnown(double p_e, double q_x) {
  return (1.0 - p_e) * H2(q_x);
}

using Channel = std::vector<std::vector<double>>;

// I(X;Y) as H(X) - H(X|Y), the mirror image of the usual H(Y) - H(Y|X).
inline double MutualInfo(const std::vector<double>& p_x, const Channel& w) {
  const std::size_t k = p_x.size();
  double h_x_given_y = 0.0;
  for (std::size_t y = 0; y < k; ++y) {
    double p_y = 0.0;
    for (std::size_t x = 0; x < k; ++x) p_y += p_x[x] * w[x][y];
    if (p_y <= 0.0) continue;
    for (std::size_t x = 0; x < k; ++x) {
      const double post = p_x[x] * w[x][y] / p_y;
      h_x_given_y += p_y * Plogp(post);
    }
  }
  return std::max(0.0, Entropy(p_x) - h_x_given_y);
}

inline double Draw(const std::vector<double>& p_x, const Channel& w) {
  double d = 0.0;
  for (std::size_t x = 0; x < p_x.size(); ++x)
    for (std::size_t y = 0; y <= x; ++y) d += p_x[x] * w[x][y] * (x - y);
  return d;
}

// Points of the probability simplex of dimension m on a lattice of pitch
// `step`, restricted to a box of half-width `radius` around `center` (pass
// an empty center for the whole simplex). The last coordinate is implied.
inline std::vector<std::vector<double>> SimplexLattice(
    int m, double step, const std::vector<double>& center = {},
    double radius = 2.0) {
  std::vector<std::vector<double>> out;
  std::vector<double> point(m, 0.0);
  const int cells = static_cast<int>(std::lround(1.0 / step));
  std::function<void(int, double)> rec = [&](int i, double left) {
    if (i == m - 1) {
      point[i] = std::max(0.0, left);
      if (!center.empty() && std::abs(point[i] - center[i]) > radius + 1e-12) {
        return;
      }
      out.push_back(point);
      return;
    }
    int lo = 0;
    int hi = static_cast<int>(std::floor(left / step + 1e-9));
    if (!center.empty()) {
      lo = std::max(lo, static_cast<int>(std::ceil((center[i] - radius) / step - 1e-9)));
      hi = std::min(hi, static_cast<int>(std::floor((center[i] + radius) / step + 1e-9)));
    }
    for (int j = lo; j <= hi && j <= cells; ++j) {
      point[i] = j * step;
      rec(i + 1, left - point[i]);
    }
  };
  rec(0, 1.0);
  return out;
}

// Minimizes I(X;Y) over channels with 0 <= x - y <= p_hat and draw <= p_bar
// by exhaustive lattice search: a pass at pitch 1e-2 over the whole feasible
// set, then two local passes at 1e-3 and 1e-4. Any lattice channel that
// overdraws is pulled back onto the constraint by mixing with Y = X, which
// keeps every candidate feasible and lets boundary optima be reached.
inline double BruteForcePpf(const std::vector<double>& p_x, double p_bar,
                            int p_hat) {
  const int k = static_cast<int>(p_x.size());
  std::vector<int> lo(k);
  for (int x = 0; x < k; ++x) lo[x] = std::max(0, x - p_hat);

  auto evaluate = [&](Channel w) {
    const double d = Draw(p_x, w);
    if (d > p_bar) {
      const double t = p_bar / d;
      for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) w[x][y] *= t;
        w[x][x] += 1.0 - t;
      }
    }
    return MutualInfo(p_x, w);
  };

  std::vector<std::vector<double>> center(k);
  double best = std::numeric_limits<double>::infinity();
  for (double step : {1e-2, 1e-3, 1e-4}) {
    std::vector<std::vector<std::vector<double>>> lattices(k);
    for (int x = 0; x < k; ++x) {
      const int m = x - lo[x] + 1;
      lattices[x] = step == 1e-2
                        ? SimplexLattice(m, step)
                        : SimplexLattice(m, step, center[x], 6 * step);
    }
    Channel w(k, std::vector<double>(k, 0.0));
    std::vector<std::vector<double>> arg = center;
    std::function<void(int)> rec = [&](int x) {
      if (x == k) {
        const double v = evaluate(w);
        if (v < best) {
          best = v;
          center = arg;
        }
        return;
      }
      for (const auto& row : lattices[x]) {
        std::fill(w[x].begin(), w[x].end(), 0.0);
        for (std::size_t j = 0; j < row.size(); ++j) w[x][lo[x] + j] = row[j];
        arg[x] = row;
        rec(x + 1);
      }
    };
    rec(0);
  }
  return best;
}

// Golden-section minimization of a unimodal function on [a, b] after a
// 1e-2 grid pass picks the bracket.
inline double GridThenGolden(const std::function<double(double)>& f, double a,
                             double b) {
  double best_t = a;
  double best = f(a);
  for (int i = 1; i <= 100; ++i) {
    const double t = a + (b - a) * i / 100.0;
    const double v = f(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = std::max(a, best_t - (b - a) / 100.0);
  double hi = std::min(b, best_t + (b - a) / 100.0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

// Binary zero-battery, hidden state: the only free parameter is the
// probability a of masking x = 1 when e = 1.
inline double BruteForceBinaryZeroUnknown(double q_x, double p_e) {
  auto leak = [&](double a) {
    const double mask = p_e * a;
    const Channel w = {{1.0, 0.0}, {mask, 1.0 - mask}};
    return MutualInfo({1.0 - q_x, q_x}, w);
  };
  return GridThenGolden(leak, 0.0, 1.0);
}

// Exact (1/n) I(X^n; Y^n) for the binary masking policy, written directly
// from its rules: with x = 1 and at least one quantum available, request 0
// with probability p_v(b), otherwise request x; the battery gains e, loses
// x - y and saturates at b_max.
inline double BinaryMaskingRate(double q_x, double p_e,
                                const std::vector<double>& p_v, int n) {
  const int b_max = static_cast<int>(p_v.size()) - 1;
  // Joint law of (x-sequence, y-sequence) as bit masks, per SOC.
  std::map<std::pair<unsigned, unsigned>, std::vector<double>> paths;
  paths[{0u, 0u}] = std::vector<double>(b_max + 1, 0.0);
  paths[{0u, 0u}][0] = 1.0;
  for (int t = 0; t < n; ++t) {
    std::map<std::pair<unsigned, unsigned>, std::vector<double>> next;
    for (const auto& [key, soc] : paths) {
      for (int b = 0; b <= b_max; ++b) {
        if (soc[b] == 0.0) continue;
        for (int x = 0; x <= 1; ++x)
          for (int e = 0; e <= 1; ++e) {
            const double p = soc[b] * (x ? q_x : 1.0 - q_x) * (e ? p_e : 1.0 - p_e);
            if (p == 0.0) continue;
            const bool can = x == 1 && b + e >= 1;
            const double mask = can ? p_v[b] : 0.0;
            for (int y = 0; y <= 1; ++y) {
              double py = 0.0;
              if (x == 0) py = y == 0 ? 1.0 : 0.0;
              if (x == 1) py = y == 0 ? mask : 1.0 - mask;
              if (py == 0.0) continue;
              const int b_next = std::min(b + e - (x - y), b_max);
              auto& slot = next[{key.first | (x << t), key.second | (y << t)}];
              if (slot.empty()) slot.assign(b_max + 1, 0.0);
              slot[b_next] += p * py;
            }
          }
      }
    }
    paths.swap(next);
  }
  std::map<unsigned, double> p_y;
  std::map<unsigned, double> p_x;
  double h_xy = 0.0;
  for (const auto& [key, soc] : paths) {
    double p = 0.0;
    for (double v : soc) p += v;
    h_xy += Plogp(p);
    p_y[key.second] += p;
    p_x[key.first] += p;
  }
  double h_y = 0.0;
  double h_x = 0.0;
  for (const auto& [k, v] : p_y) h_y += Plogp(v);
  for (const auto& [k, v] : p_x) h_x += Plogp(v);
  return (h_x + h_y - h_xy) / n;
}

}  // namespace oracle

#endif  // SMARTLEAK_TESTS_ORACLES_HPP_
