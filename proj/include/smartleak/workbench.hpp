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

// Experiment plumbing: profile ingestion and the figure sweeps.
//
// Sweeps evaluate their grid cells on a worker pool but always emit rows in
// grid order, and every estimate uses the configured seed list, so a rerun
// with the same configuration produces byte-identical CSV.

#ifndef SMARTLEAK_WORKBENCH_HPP_
#define SMARTLEAK_WORKBENCH_HPP_

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "smartleak/core.hpp"
#include "smartleak/io.hpp"
#include "smartleak/leakage_sim.hpp"
#include "smartleak/parallel.hpp"
#include "smartleak/policies.hpp"
#include "smartleak/policy_opt.hpp"
#include "smartleak/privacy_power.hpp"
#include "smartleak/zero_battery.hpp"

namespace smartleak {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Profile ingestion

struct IngestResult {
  Pmf pmf = Pmf::PointMass(0, 1);
  // Fraction of samples that landed beyond the top bin.
  double clipped_mass = 0.0;
  std::size_t samples = 0;
};

namespace internal {

inline std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool ParseDouble(const std::string& text, double* out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size() || !std::isfinite(v)) {
    return false;
  }
  *out = v;
  return true;
}

}  // namespace internal

// Bins one CSV column at `quantum` (bin = floor(v / quantum)) and clips bins
// above alphabet_size - 1 to the top bin. A non-numeric first line is taken
// as a header; any later non-numeric row is an error.
inline IngestResult IngestProfile(std::istream& in, double quantum,
                                  int alphabet_size, int column = 0) {
  if (!(quantum > 0.0) || !std::isfinite(quantum)) {
    throw InvalidArgumentError("IngestProfile: quantum must be > 0");
  }
  if (alphabet_size < 1 || column < 0) {
    throw InvalidArgumentError("IngestProfile: bad alphabet size or column");
  }
  std::vector<double> counts(alphabet_size, 0.0);
  std::size_t clipped = 0;
  std::size_t samples = 0;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::Trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(internal::Trim(field));
    double v = 0.0;
    const bool ok = static_cast<std::size_t>(column) < fields.size() &&
                    internal::ParseDouble(fields[column], &v);
    if (!ok) {
      if (!seen_content) {
        seen_content = true;  // header row
        continue;
      }
      throw InvalidArgumentError("IngestProfile: non-numeric value on line " +
                                 std::to_string(line_no));
    }
    seen_content = true;
    if (v < 0.0) {
      throw InvalidArgumentError("IngestProfile: negative value on line " +
                                 std::to_string(line_no));
    }
    // The tiny offset keeps exact multiples such as 1.5 / 0.5 in their bin.
    const double bin = std::floor(v / quantum + 1e-9);
    ++samples;
    if (bin > alphabet_size - 1) {
      ++clipped;
      counts.back() += 1.0;
    } else {
      counts[static_cast<std::size_t>(bin)] += 1.0;
    }
  }
  if (samples == 0) throw InvalidArgumentError("IngestProfile: no data rows");
  if (clipped == samples) {
    throw InvalidArgumentError("IngestProfile: every sample exceeds the alphabet");
  }
  for (double& c : counts) c /= static_cast<double>(samples);
  double total = 0.0;
  for (double c : counts) total += c;
  for (double& c : counts) c /= total;
  IngestResult result;
  result.pmf = Pmf(std::move(counts));
  result.clipped_mass = static_cast<double>(clipped) / samples;
  result.samples = samples;
  return result;
}

inline IngestResult IngestProfile(const std::string& path, double quantum,
                                  int alphabet_size, int column = 0) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("IngestProfile: cannot open " + path);
  return IngestProfile(in, quantum, alphabet_size, column);
}

// ---------------------------------------------------------------------------
// CSV output

// Shortest round-trippable-enough decimal with a fixed format, '.' decimal
// separator regardless of locale, and no negative zero.
inline std::string FormatNumber(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> metadata;  // written as "# line"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string ToString() const {
    std::string out;
    for (const auto& m : metadata) out += "# " + m + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out += (i ? "," : "") + columns[i];
    }
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
      out += "\n";
    }
    return out;
  }
};

namespace internal {

inline std::vector<std::string> SimMetadata(const SimOptions& sim) {
  std::string seeds;
  for (int i = 0; i < sim.seeds; ++i) {
    seeds += (i ? " " : "") + std::to_string(sim.seed_base + i);
  }
  return {std::string("smartleak version: ") + kVersion,
          "seeds: " + seeds, "n: " + std::to_string(sim.n),
          "battery starts empty; no burn-in discarded"};
}

inline std::vector<double> DefaultGrid(double from, double to, double step) {
  std::vector<double> grid;
  const int count = static_cast<int>(std::round((to - from) / step));
  for (int i = 0; i <= count; ++i) {
    grid.push_back(std::round((from + i * step) * 1e12) / 1e12);
  }
  return grid;
}

inline std::vector<BatteryCapacity> CapacityList(const io::Json& j,
                                                 const char* key,
                                                 std::vector<std::int64_t> fallback) {
  std::vector<BatteryCapacity> out;
  if (j.is_object() && j.contains(key)) {
    if (!j.at(key).is_array()) throw ConfigError(std::string(key) + " must be a list");
    for (const auto& v : j.at(key)) {
      const BatteryCapacity c = io::CapacityFromJson(v);
      if (c.is_infinite()) {
        throw ConfigError(std::string(key) + ": list finite capacities only");
      }
      out.push_back(c);
    }
    return out;
  }
  for (auto q : fallback) out.push_back(BatteryCapacity::Finite(q));
  return out;
}

inline void CheckUnitGrid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw ConfigError(std::string(what) + ": empty p_e grid");
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string(what) + ": p_e values must lie in [0, 1]");
    }
  }
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Figure 4: optimal battery-independent masking probability.

struct Figure4Config {
  double q_x = 0.5;
  std::vector<double> p_e = internal::DefaultGrid(0.1, 1.0, 0.1);
  std::vector<BatteryCapacity> b_max = {
      BatteryCapacity::Finite(1), BatteryCapacity::Finite(2),
      BatteryCapacity::Finite(5), BatteryCapacity::Finite(10)};
  double grid_step = 0.05;
  SimOptions sim{100000, 4, 1, 1};

  static Figure4Config FromJson(const io::Json& j, SimOptions sim) {
    Figure4Config c;
    c.sim = sim;
    c.q_x = io::Get<double>(j, "q_x", c.q_x);
    c.p_e = io::Get<std::vector<double>>(j, "p_e", c.p_e);
    c.b_max = internal::CapacityList(j, "b_max", {1, 2, 5, 10});
    c.grid_step = io::Get<double>(j, "grid_step", c.grid_step);
    return c;
  }
};

struct Figure4Row {
  double p_e = 0.0;
  std::int64_t b_max = 0;
  double best_p_v = 0.0;
  double leakage = 0.0;
  double std_error = 0.0;
};

inline std::vector<Figure4Row> SweepFigure4(const Figure4Config& config) {
  internal::CheckUnitGrid(config.p_e, "figure4");
  for (double p : config.p_e) {
    if (p == 0.0) throw ConfigError("figure4: the p_e grid excludes 0");
  }
  std::vector<Figure4Row> rows(config.p_e.size() * config.b_max.size());
  SimOptions inner = config.sim;
  inner.threads = 1;
  ParallelFor(rows.size(), config.sim.threads, [&](std::size_t i) {
    const double p_e = config.p_e[i / config.b_max.size()];
    const BatteryCapacity cap = config.b_max[i % config.b_max.size()];
    const ScanResult scan =
        ScanPv(GridModel::Binary(config.q_x, p_e, cap), config.grid_step, inner);
    rows[i] = {p_e, cap.quanta(), scan.best_p_v, scan.best_leakage,
               scan.best_std_error};
  });
  return rows;
}

inline CsvTable Figure4Csv(const Figure4Config& config,
                           const std::vector<Figure4Row>& rows) {
  CsvTable t;
  t.metadata = internal::SimMetadata(config.sim);
  t.metadata.insert(t.metadata.begin() + 1, "sweep: figure4");
  t.metadata.push_back("q_x: " + FormatNumber(config.q_x));
  t.metadata.push_back("p_v grid step: " + FormatNumber(config.grid_step) +
                       "; ties go to the larger p_v");
  t.columns = {"p_e", "b_max", "best_p_v", "leakage", "std_error"};
  for (const auto& r : rows) {
    t.rows.push_back({FormatNumber(r.p_e), std::to_string(r.b_max),
                      FormatNumber(r.best_p_v), FormatNumber(r.leakage),
                      FormatNumber(r.std_error)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Figure 5: minimum leakage versus renewable rate, binary model.

struct Figure5Config {
  double q_x = 0.5;
  std::vector<double> p_e = internal::DefaultGrid(0.0, 1.0, 0.1);
  std::vector<BatteryCapacity> b_max = {BatteryCapacity::Finite(1),
                                        BatteryCapacity::Finite(2),
                                        BatteryCapacity::Finite(5)};
  // Coarse battery-independent scan that seeds the per-SOC descent.
  double scan_step = 0.1;
  SgdOptions sgd;
  SimOptions sim{100000, 4, 1, 1};
  ZeroBatteryOptions zero;
  PpfOptions ppf;

  static Figure5Config FromJson(const io::Json& j, SimOptions sim, double tol) {
    Figure5Config c;
    c.sim = sim;
    c.q_x = io::Get<double>(j, "q_x", c.q_x);
    c.p_e = io::Get<std::vector<double>>(j, "p_e", c.p_e);
    c.b_max = internal::CapacityList(j, "b_max", {1, 2, 5});
    c.scan_step = io::Get<double>(j, "scan_step", c.scan_step);
    if (j.is_object() && j.contains("sgd")) {
      const auto& s = j.at("sgd");
      c.sgd.probes = io::Get<int>(s, "probes", c.sgd.probes);
      c.sgd.radius = io::Get<double>(s, "radius", c.sgd.radius);
      c.sgd.learning_rate = io::Get<double>(s, "learning_rate", c.sgd.learning_rate);
      c.sgd.stop_threshold =
          io::Get<double>(s, "stop_threshold", c.sgd.stop_threshold);
      c.sgd.max_iterations = io::Get<int>(s, "max_iterations", c.sgd.max_iterations);
    }
    if (tol > 0.0) {
      c.ppf.tol = tol;
      c.zero.tol = tol;
    }
    return c;
  }
};

struct Figure5Row {
  double p_e = 0.0;
  std::string label;  // "0_known", "0_unknown", capacity, or "inf"
  double leakage = 0.0;
  double std_error = 0.0;
  bool converged = true;
};

inline std::vector<Figure5Row> SweepFigure5(const Figure5Config& config) {
  internal::CheckUnitGrid(config.p_e, "figure5");
  const std::size_t per_pe = config.b_max.size() + 3;
  std::vector<Figure5Row> rows(config.p_e.size() * per_pe);
  SimOptions inner = config.sim;
  inner.threads = 1;
  const Pmf p_x = Pmf::Bernoulli(config.q_x);
  ParallelFor(rows.size(), config.sim.threads, [&](std::size_t i) {
    const double p_e = config.p_e[i / per_pe];
    const std::size_t slot = i % per_pe;
    const Pmf law_e = Pmf::Bernoulli(p_e);
    Figure5Row& row = rows[i];
    row.p_e = p_e;
    if (slot == 0) {
      row.label = "0_known";
      row.leakage = SolveZeroKnown(p_x, law_e, 1, config.ppf);
    } else if (slot == 1) {
      row.label = "0_unknown";
      ZeroBatteryOptions zero = config.zero;
      zero.peak_cap = 1;
      zero.threads = 1;
      const ZeroBatteryResult r = SolveZeroUnknown(p_x, law_e, zero);
      row.leakage = r.leakage_bits;
      row.converged = r.converged;
    } else if (slot == per_pe - 1) {
      row.label = "inf";
      const PpfResult r = Ppf(p_x, p_e, 1, config.ppf);
      row.leakage = r.leakage_bits;
      row.converged = r.converged;
    } else {
      const BatteryCapacity cap = config.b_max[slot - 2];
      const GridModel model = GridModel::Binary(config.q_x, p_e, cap);
      const ScanResult scan = ScanPv(model, config.scan_step, inner);
      const std::vector<double> init(cap.quanta() + 1, scan.best_p_v);
      const SgdResult sgd = SgdBatteryConditioned(model, init, config.sgd, inner);
      row.label = cap.ToString();
      row.leakage = sgd.leakage;
      row.std_error = sgd.std_error;
    }
  });
  return rows;
}

inline CsvTable Figure5Csv(const Figure5Config& config,
                           const std::vector<Figure5Row>& rows) {
  CsvTable t;
  t.metadata = internal::SimMetadata(config.sim);
  t.metadata.insert(t.metadata.begin() + 1, "sweep: figure5");
  t.metadata.push_back("q_x: " + FormatNumber(config.q_x));
  t.metadata.push_back("ppf tol: " + FormatNumber(config.ppf.tol) +
                       "; zero-battery tol: " + FormatNumber(config.zero.tol));
  t.metadata.push_back(
      "finite b_max: battery-conditioned policy, scan step " +
      FormatNumber(config.scan_step) + " then descent with " +
      std::to_string(config.sgd.probes) + " probes, radius " +
      FormatNumber(config.sgd.radius) + ", rate " +
      FormatNumber(config.sgd.learning_rate) + ", stop " +
      FormatNumber(config.sgd.stop_threshold));
  t.metadata.push_back("inf row: privacy-power function with P_hat = 1");
  t.columns = {"p_e", "b_max", "leakage", "std_error", "converged"};
  for (const auto& r : rows) {
    t.rows.push_back({FormatNumber(r.p_e), r.label, FormatNumber(r.leakage),
                      FormatNumber(r.std_error), r.converged ? "1" : "0"});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Figure 6: five-level demand, binomial renewable, three-level policies.

struct Figure6Config {
  std::vector<double> p_e = internal::DefaultGrid(0.0, 1.0, 0.1);
  std::vector<BatteryCapacity> b_max = {BatteryCapacity::Finite(0),
                                        BatteryCapacity::Finite(1),
                                        BatteryCapacity::Finite(2)};
  double grid_step = 0.5;
  SimOptions sim{20000, 2, 1, 1};
  PpfOptions ppf;

  static constexpr int kAlphabet = 5;
  static constexpr int kPeak = 4;

  static Figure6Config FromJson(const io::Json& j, SimOptions sim, double tol) {
    Figure6Config c;
    c.sim = sim;
    c.p_e = io::Get<std::vector<double>>(j, "p_e", c.p_e);
    c.b_max = internal::CapacityList(j, "b_max", {0, 1, 2});
    c.grid_step = io::Get<double>(j, "grid_step", c.grid_step);
    if (tol > 0.0) c.ppf.tol = tol;
    return c;
  }
};

struct Figure6Row {
  double p_e = 0.0;
  std::string label;
  double leakage = 0.0;
  double std_error = 0.0;
  bool converged = true;
};

// Demand uniform on {0..4}; renewable binomial(4, p_e) so its support
// matches the alphabet.
inline GridModel Figure6Model(double p_e, BatteryCapacity cap) {
  return GridModel(Pmf::Uniform(Figure6Config::kAlphabet),
                   Pmf::Binomial(Figure6Config::kAlphabet - 1, p_e), cap,
                   Figure6Config::kPeak);
}

inline std::vector<Figure6Row> SweepFigure6(const Figure6Config& config) {
  internal::CheckUnitGrid(config.p_e, "figure6");
  const std::size_t per_pe = config.b_max.size() + 1;
  std::vector<Figure6Row> rows(config.p_e.size() * per_pe);
  SimOptions inner = config.sim;
  inner.threads = 1;
  ParallelFor(rows.size(), config.sim.threads, [&](std::size_t i) {
    const double p_e = config.p_e[i / per_pe];
    const std::size_t slot = i % per_pe;
    Figure6Row& row = rows[i];
    row.p_e = p_e;
    if (slot == per_pe - 1) {
      row.label = "inf";
      const PpfResult r =
          Ppf(Pmf::Uniform(Figure6Config::kAlphabet),
              (Figure6Config::kAlphabet - 1) * p_e, Figure6Config::kPeak,
              config.ppf);
      row.leakage = r.leakage_bits;
      row.converged = r.converged;
      return;
    }
    const BatteryCapacity cap = config.b_max[slot];
    const ThreeLevelResult best =
        SearchThreeLevel(Figure6Model(p_e, cap), config.grid_step, inner);
    row.label = cap.ToString();
    row.leakage = best.leakage;
    row.std_error = best.std_error;
  });
  return rows;
}

inline CsvTable Figure6Csv(const Figure6Config& config,
                           const std::vector<Figure6Row>& rows) {
  CsvTable t;
  t.metadata = internal::SimMetadata(config.sim);
  t.metadata.insert(t.metadata.begin() + 1, "sweep: figure6");
  t.metadata.push_back(
      "demand uniform on {0..4}; renewable binomial(4, p_e) so its support "
      "matches the alphabet");
  t.metadata.push_back("three-level grid step: " + FormatNumber(config.grid_step));
  t.metadata.push_back("ppf tol: " + FormatNumber(config.ppf.tol));
  t.metadata.push_back("inf row: privacy-power function with P_hat = 4");
  t.columns = {"p_e", "b_max", "leakage", "std_error", "converged"};
  for (const auto& r : rows) {
    t.rows.push_back({FormatNumber(r.p_e), r.label, FormatNumber(r.leakage),
                      FormatNumber(r.std_error), r.converged ? "1" : "0"});
  }
  return t;
}

}  // namespace smartleak

#endif  // SMARTLEAK_WORKBENCH_HPP_
