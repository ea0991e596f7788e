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

// Umbrella header.

#ifndef SMARTLEAK_SMARTLEAK_HPP_
#define SMARTLEAK_SMARTLEAK_HPP_

#include "smartleak/binary.hpp"
#include "smartleak/core.hpp"
#include "smartleak/io.hpp"
#include "smartleak/leakage_sim.hpp"
#include "smartleak/parallel.hpp"
#include "smartleak/policies.hpp"
#include "smartleak/policy_opt.hpp"
#include "smartleak/privacy_power.hpp"
#include "smartleak/random.hpp"
#include "smartleak/slb.hpp"
#include "smartleak/workbench.hpp"
#include "smartleak/zero_battery.hpp"

#endif  // SMARTLEAK_SMARTLEAK_HPP_
