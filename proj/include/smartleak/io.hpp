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

// JSON (de)serialization for models, policies and simulation settings.
//
// Model schema, either form:
//   {"binary": {"q_x": 0.5, "p_e": 0.5}, "b_max": 1}
//   {"p_x": [..], "p_e": [..], "b_max": 3 | "inf", "p_hat": 2}
// Policy schema:
//   {"type": "battery_independent", "p_v": 0.7}
//   {"type": "battery_conditioned", "p_v": [..]}
//   {"type": "three_level", "p": [6 values]}
//   {"type": "best_effort", "channel": [[..], ..]}
//   {"type": "store_and_hide", "storage_len": 100, "channel": [[..], ..]}

#ifndef SMARTLEAK_IO_HPP_
#define SMARTLEAK_IO_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "smartleak/core.hpp"
#include "smartleak/leakage_sim.hpp"
#include "smartleak/policies.hpp"

namespace smartleak {

// Malformed or inconsistent configuration.
class ConfigError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

namespace io {

using Json = nlohmann::json;

inline Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

// Fetches `key` from `obj` as T, or `fallback` when absent.
template <typename T>
T Get(const Json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
T Require(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("config key '") + key + "' is required");
  }
  return Get<T>(obj, key, T{});
}

inline BatteryCapacity CapacityFromJson(const Json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") return BatteryCapacity::Infinite();
    throw ConfigError("b_max must be an integer or \"inf\"");
  }
  if (!value.is_number_integer()) {
    throw ConfigError("b_max must be an integer or \"inf\"");
  }
  return BatteryCapacity::Finite(value.get<std::int64_t>());
}

inline Json CapacityToJson(BatteryCapacity cap) {
  if (cap.is_infinite()) return "inf";
  return cap.quanta();
}

inline GridModel ModelFromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("model must be an object");
  const BatteryCapacity cap =
      j.contains("b_max") ? CapacityFromJson(j.at("b_max"))
                          : BatteryCapacity::Finite(0);
  try {
    if (j.contains("binary")) {
      const Json& b = j.at("binary");
      return GridModel::Binary(Require<double>(b, "q_x"),
                               Require<double>(b, "p_e"), cap);
    }
    return GridModel(Pmf(Require<std::vector<double>>(j, "p_x")),
                     Pmf(Require<std::vector<double>>(j, "p_e")), cap,
                     Require<int>(j, "p_hat"));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline Json ModelToJson(const GridModel& m) {
  Json j;
  j["p_x"] = std::vector<double>(m.p_x.probs().begin(), m.p_x.probs().end());
  j["p_e"] = std::vector<double>(m.p_e.probs().begin(), m.p_e.probs().end());
  j["b_max"] = CapacityToJson(m.b_max);
  j["p_hat"] = m.p_hat;
  return j;
}

inline Json ChannelToJson(const ConditionalPmf& c) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < c.size(); ++x) {
    const auto p = c.row(x).probs();
    rows.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return rows;
}

inline ConditionalPmf ChannelFromJson(const Json& j) {
  try {
    return ConditionalPmf(j.get<std::vector<std::vector<double>>>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
}

inline Json PolicyToJson(const Policy& policy) {
  Json j;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BestEffort>) {
          j["type"] = "best_effort";
          j["channel"] = ChannelToJson(p.channel);
        } else if constexpr (std::is_same_v<T, StoreAndHide>) {
          j["type"] = "store_and_hide";
          j["storage_len"] = p.storage_len;
          j["channel"] = ChannelToJson(p.channel);
        } else if constexpr (std::is_same_v<T, BatteryIndependent>) {
          j["type"] = "battery_independent";
          j["p_v"] = p.p_v;
        } else if constexpr (std::is_same_v<T, BatteryConditioned>) {
          j["type"] = "battery_conditioned";
          j["p_v"] = p.p_v;
        } else {
          j["type"] = "three_level";
          j["p"] = std::vector<double>(p.p.begin(), p.p.end());
        }
      },
      policy);
  return j;
}

inline Policy PolicyFromJson(const Json& j) {
  const auto type = Require<std::string>(j, "type");
  if (type == "battery_independent") {
    return BatteryIndependent{Require<double>(j, "p_v")};
  }
  if (type == "battery_conditioned") {
    return BatteryConditioned{Require<std::vector<double>>(j, "p_v")};
  }
  if (type == "three_level") {
    const auto p = Require<std::vector<double>>(j, "p");
    if (p.size() != 6) throw ConfigError("three_level needs 6 probabilities");
    ThreeLevel out;
    std::copy(p.begin(), p.end(), out.p.begin());
    return out;
  }
  if (type == "best_effort") {
    if (!j.contains("channel")) throw ConfigError("best_effort needs a channel");
    return BestEffort{ChannelFromJson(j.at("channel"))};
  }
  if (type == "store_and_hide") {
    if (!j.contains("channel")) {
      throw ConfigError("store_and_hide needs a channel");
    }
    return StoreAndHide{Require<std::int64_t>(j, "storage_len"),
                        ChannelFromJson(j.at("channel"))};
  }
  throw ConfigError("unknown policy type: " + type);
}

// Reads the "simulation" section; missing keys keep their defaults.
inline SimOptions SimOptionsFromJson(const Json& j, SimOptions base = {}) {
  base.n = Get<std::int64_t>(j, "n", base.n);
  base.seeds = Get<int>(j, "seeds", base.seeds);
  base.seed_base = Get<std::uint64_t>(j, "seed_base", base.seed_base);
  base.threads = Get<int>(j, "threads", base.threads);
  if (base.n < 1 || base.seeds < 1 || base.threads < 1) {
    throw ConfigError("simulation: n, seeds and threads must be >= 1");
  }
  return base;
}

}  // namespace io
}  // namespace smartleak

#endif  // SMARTLEAK_IO_HPP_
