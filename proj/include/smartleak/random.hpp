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

#ifndef SMARTLEAK_RANDOM_HPP_
#define SMARTLEAK_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "smartleak/core.hpp"

namespace smartleak {

// Seeded pseudorandom stream. Uniform() maps the top 53 bits of a
// mt19937_64 draw to [0, 1), so trajectories are bit-identical for a given
// seed on every platform (std::uniform_real_distribution is not).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler for a Pmf.
class CdfSampler {
 public:
  CdfSampler() = default;
  explicit CdfSampler(std::span<const double> probs) { Reset(probs); }

  void Reset(std::span<const double> probs) {
    cdf_.assign(probs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf_[i] = acc;
    }
    last_ = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
      if (probs[i] > 0.0) last_ = i;
  }

  // Smallest index whose cumulative mass exceeds u. Rounding residue at the
  // top end falls on the last index with positive mass.
  int Sample(double u) const {
    for (std::size_t i = 0; i < last_; ++i)
      if (u < cdf_[i]) return static_cast<int>(i);
    return static_cast<int>(last_);
  }

 private:
  std::vector<double> cdf_;
  std::size_t last_ = 0;
};

}  // namespace smartleak

#endif  // SMARTLEAK_RANDOM_HPP_
