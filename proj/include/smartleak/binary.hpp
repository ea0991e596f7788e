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

// Closed-form leakage rates for binary demand, renewable and output
// alphabets. q_x = Pr{X=1}, p_e = Pr{E=1}; p_v is the probability of using
// available energy when X=1.

#ifndef SMARTLEAK_BINARY_HPP_
#define SMARTLEAK_BINARY_HPP_

#include <algorithm>
#include <cmath>
#include <string>

#include "smartleak/core.hpp"

namespace smartleak::binary {

namespace internal {

// Accepts values up to 1e-12 outside [0, 1] and clamps them; anything
// further out is a caller error.
inline double CheckedProbability(double p, const char* name) {
  if (!(p >= -kPmfTolerance && p <= 1.0 + kPmfTolerance)) {
    throw InvalidArgumentError(std::string(name) + " must lie in [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double PLogP(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace internal

// Infinite battery with P_hat = 1.
inline double LeakInfBattery(double p_e, double q_x) {
  p_e = internal::CheckedProbability(p_e, "p_e");
  q_x = internal::CheckedProbability(q_x, "q_x");
  if (p_e > q_x) return 0.0;
  using internal::PLogP;
  return std::max(0.0, PLogP(p_e) - PLogP(q_x) - PLogP(1.0 - q_x + p_e));
}

// No battery, renewable state hidden from the utility provider.
inline double LeakZeroUnknown(double p_e, double p_v, double q_x) {
  p_e = internal::CheckedProbability(p_e, "p_e");
  p_v = internal::CheckedProbability(p_v, "p_v");
  q_x = internal::CheckedProbability(q_x, "q_x");
  return BinaryEntropy(1.0 - q_x + q_x * p_e * p_v) -
         q_x * BinaryEntropy(p_e * p_v);
}

// The zero-battery unknown-state leakage is minimized by always using the
// available energy.
constexpr double OptimalPv() { return 1.0; }

// No battery, renewable state known to the utility provider.
inline double LeakZeroKnown(double p_e, double q_x) {
  p_e = internal::CheckedProbability(p_e, "p_e");
  q_x = internal::CheckedProbability(q_x, "q_x");
  return (1.0 - p_e) * BinaryEntropy(q_x);
}

}  // namespace smartleak::binary

#endif  // SMARTLEAK_BINARY_HPP_
