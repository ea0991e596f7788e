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

// Command-line front end. Every subcommand writes one CSV table (metadata
// lines start with '#') to --out or stdout.
//
// Exit codes: 0 success, 2 configuration or argument error, 3 numerical
// failure or solver non-convergence.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smartleak/io.hpp"
#include "smartleak/smartleak.hpp"

namespace smartleak {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::optional<int> seeds;
  std::optional<std::int64_t> n;
  std::optional<double> tol;
  std::optional<int> threads;
};

io::Json LoadConfig(const CommonFlags& flags) {
  if (flags.config_path.empty()) return io::Json::object();
  io::Json j = io::ReadJsonFile(flags.config_path);
  if (!j.is_object()) throw ConfigError("config root must be an object");
  return j;
}

io::Json Section(const io::Json& root, const char* key) {
  if (!root.contains(key)) return io::Json::object();
  const io::Json& s = root.at(key);
  if (!s.is_object()) throw ConfigError(std::string("section '") + key + "' must be an object");
  return s;
}

// Precedence: flag, then SMARTLEAK_THREADS, then the config file, then the
// defaults passed in.
SimOptions ResolveSim(const CommonFlags& flags, const io::Json& root,
                      SimOptions defaults) {
  SimOptions sim = io::SimOptionsFromJson(Section(root, "simulation"), defaults);
  if (const char* env = std::getenv("SMARTLEAK_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw ConfigError("SMARTLEAK_THREADS must be a positive integer");
    }
    sim.threads = static_cast<int>(v);
  }
  if (flags.threads) sim.threads = *flags.threads;
  if (flags.seeds) sim.seeds = *flags.seeds;
  if (flags.n) sim.n = *flags.n;
  if (sim.n < 1 || sim.seeds < 1 || sim.threads < 1) {
    throw ConfigError("n, seeds and threads must be >= 1");
  }
  return sim;
}

double ResolveTol(const CommonFlags& flags, const io::Json& root, double fallback) {
  const double tol = flags.tol ? *flags.tol
                               : io::Get<double>(Section(root, "solver"), "tol", fallback);
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  return tol;
}

void Emit(const CommonFlags& flags, const CsvTable& table) {
  const std::string text = table.ToString();
  if (flags.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + flags.out_path);
  out << text;
}

void WriteSide(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << table.ToString();
}

std::vector<std::string> BaseMetadata(const std::string& command) {
  return {std::string("smartleak version: ") + kVersion, "command: " + command};
}

int ConvergenceStatus(bool converged, const char* what) {
  if (converged) return kExitOk;
  std::cerr << "warning: " << what << " did not converge\n";
  return kExitNumerical;
}

// Model from flags when --q-x is given, otherwise from the "model" section.
struct BinaryFlags {
  std::optional<double> q_x;
  std::optional<double> p_e;
  std::optional<std::string> b_max;
};

GridModel ResolveModel(const BinaryFlags& flags, const io::Json& root) {
  if (flags.q_x || flags.p_e || flags.b_max) {
    if (!flags.q_x || !flags.p_e) {
      throw ConfigError("--q-x and --p-e must be given together");
    }
    io::Json j;
    j["binary"] = {{"q_x", *flags.q_x}, {"p_e", *flags.p_e}};
    if (flags.b_max) {
      j["b_max"] = *flags.b_max == "inf" ? io::Json("inf")
                                         : io::Json(std::stoll(*flags.b_max));
    }
    return io::ModelFromJson(j);
  }
  if (!root.contains("model")) {
    throw ConfigError("no model: pass --q-x/--p-e or a config with a 'model' section");
  }
  return io::ModelFromJson(root.at("model"));
}

void AddBinaryFlags(CLI::App* cmd, BinaryFlags& flags) {
  cmd->add_option("--q-x", flags.q_x, "Binary demand probability Pr{X = 1}");
  cmd->add_option("--p-e", flags.p_e, "Binary renewable probability Pr{E = 1}");
  cmd->add_option("--b-max", flags.b_max, "Battery capacity in quanta or 'inf'");
}

std::string Join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + FormatNumber(v[i]);
  return s;
}

// ---------------------------------------------------------------------------

struct PpfFlags {
  std::vector<double> p_x;
  std::optional<double> p_bar;
  std::optional<int> p_hat;
  std::vector<double> grid;
};

int RunPpf(const CommonFlags& common, const PpfFlags& flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "ppf");
  const std::vector<double> p_x =
      !flags.p_x.empty() ? flags.p_x : io::Require<std::vector<double>>(sec, "p_x");
  const int p_hat = flags.p_hat ? *flags.p_hat : io::Require<int>(sec, "p_hat");
  const std::vector<double> grid =
      !flags.grid.empty() ? flags.grid
                          : io::Get<std::vector<double>>(sec, "grid", {});
  PpfOptions opts;
  opts.tol = ResolveTol(common, root, opts.tol);
  opts.backoff = io::Get<double>(sec, "backoff", opts.backoff);
  const Pmf pmf(p_x);
  CsvTable t;
  t.metadata = BaseMetadata("ppf");
  t.metadata.push_back("p_x: " + Join(p_x));
  t.metadata.push_back("p_hat: " + std::to_string(p_hat));
  t.metadata.push_back("tol: " + FormatNumber(opts.tol));
  bool converged = true;
  if (!grid.empty()) {
    const SimOptions sim = ResolveSim(common, root, {1, 1, 1, 1});
    const auto curve = PpfCurve(pmf, p_hat, grid, opts, sim.threads);
    t.columns = {"p_bar", "leakage", "converged"};
    for (const auto& c : curve) {
      t.rows.push_back({FormatNumber(c.p_bar), FormatNumber(c.leakage_bits),
                        c.converged ? "1" : "0"});
      converged = converged && c.converged;
    }
  } else {
    const double p_bar = flags.p_bar ? *flags.p_bar : io::Require<double>(sec, "p_bar");
    const PpfResult r = Ppf(pmf, p_bar, p_hat, opts);
    t.columns = {"p_bar", "leakage", "achieved_avg_draw", "iterations", "converged"};
    t.rows.push_back({FormatNumber(p_bar), FormatNumber(r.leakage_bits),
                      FormatNumber(r.achieved_avg_draw), std::to_string(r.iterations),
                      r.converged ? "1" : "0"});
    converged = r.converged;
  }
  Emit(common, t);
  return ConvergenceStatus(converged, "privacy-power solver");
}

struct ZeroFlags {
  std::vector<double> p_x;
  std::vector<double> p_e;
  bool known = false;
  std::optional<int> peak_cap;
};

int RunZero(const CommonFlags& common, const ZeroFlags& flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "zero");
  const Pmf p_x(!flags.p_x.empty() ? flags.p_x
                                   : io::Require<std::vector<double>>(sec, "p_x"));
  const Pmf p_e(!flags.p_e.empty() ? flags.p_e
                                   : io::Require<std::vector<double>>(sec, "p_e"));
  const bool known = flags.known || io::Get<bool>(sec, "known", false);
  std::optional<int> cap = flags.peak_cap;
  if (!cap && sec.contains("peak_cap")) cap = io::Require<int>(sec, "peak_cap");
  CsvTable t;
  t.metadata = BaseMetadata("zero");
  t.metadata.push_back(std::string("renewable state: ") + (known ? "known" : "unknown"));
  if (cap) t.metadata.push_back("peak cap: " + std::to_string(*cap));
  t.columns = {"leakage", "iterations", "converged"};
  bool converged = true;
  if (known) {
    PpfOptions opts;
    opts.tol = ResolveTol(common, root, opts.tol);
    t.metadata.push_back("tol: " + FormatNumber(opts.tol));
    t.rows.push_back({FormatNumber(SolveZeroKnown(p_x, p_e, cap, opts)), "0", "1"});
  } else {
    ZeroBatteryOptions opts;
    opts.tol = ResolveTol(common, root, opts.tol);
    opts.peak_cap = cap;
    opts.threads = ResolveSim(common, root, {1, 1, 1, 1}).threads;
    t.metadata.push_back("tol: " + FormatNumber(opts.tol));
    const ZeroBatteryResult r = SolveZeroUnknown(p_x, p_e, opts);
    t.rows.push_back({FormatNumber(r.leakage_bits), std::to_string(r.iterations),
                      r.converged ? "1" : "0"});
    converged = r.converged;
  }
  Emit(common, t);
  return ConvergenceStatus(converged, "zero-battery solver");
}

struct BinaryCmdFlags {
  std::optional<double> q_x;
  std::optional<double> p_e;
  std::optional<double> p_v;
};

int RunBinary(const CommonFlags& common, const BinaryCmdFlags& flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "binary");
  const double q = flags.q_x ? *flags.q_x : io::Require<double>(sec, "q_x");
  const double p_e = flags.p_e ? *flags.p_e : io::Require<double>(sec, "p_e");
  const double p_v = flags.p_v ? *flags.p_v : io::Get<double>(sec, "p_v", binary::OptimalPv());
  CsvTable t;
  t.metadata = BaseMetadata("binary");
  t.metadata.push_back("q_x: " + FormatNumber(q) + "; p_e: " + FormatNumber(p_e));
  t.columns = {"case", "p_v", "leakage"};
  t.rows.push_back({"inf", "", FormatNumber(binary::LeakInfBattery(p_e, q))});
  t.rows.push_back({"0_unknown", FormatNumber(p_v),
                    FormatNumber(binary::LeakZeroUnknown(p_e, p_v, q))});
  t.rows.push_back({"0_known", "", FormatNumber(binary::LeakZeroKnown(p_e, q))});
  Emit(common, t);
  return kExitOk;
}

struct SimulateFlags {
  BinaryFlags model;
  std::optional<double> p_v;
  std::string records_path;
};

int RunSimulate(const CommonFlags& common, const SimulateFlags& flags) {
  const io::Json root = LoadConfig(common);
  const GridModel model = ResolveModel(flags.model, root);
  Policy policy = BatteryIndependent{1.0};
  if (flags.p_v) {
    policy = BatteryIndependent{*flags.p_v};
  } else if (root.contains("policy")) {
    policy = io::PolicyFromJson(root.at("policy"));
  } else {
    throw ConfigError("no policy: pass --p-v or a config with a 'policy' section");
  }
  const SimOptions sim = ResolveSim(common, root, {});
  const LeakageEstimate est = EstimateLeakage(model, policy, sim);
  CsvTable t;
  t.metadata = internal::SimMetadata(sim);
  t.metadata.insert(t.metadata.begin() + 1, "command: simulate");
  t.metadata.push_back("b_max: " + model.b_max.ToString());
  t.metadata.push_back("policy: " + io::PolicyToJson(policy).dump());
  t.columns = {"bits_per_slot", "std_error", "hy_rate", "hy_given_x_rate", "n", "seeds"};
  t.rows.push_back({FormatNumber(est.bits_per_slot), FormatNumber(est.std_error),
                    FormatNumber(est.hy_rate), FormatNumber(est.hy_given_x_rate),
                    std::to_string(est.n), std::to_string(est.seeds)});
  if (!flags.records_path.empty()) {
    CsvTable r;
    r.metadata = t.metadata;
    r.columns = {"seed", "hy_rate", "hy_given_x_rate", "bits_per_slot"};
    for (const SeedRecord& rec : est.records) {
      r.rows.push_back({std::to_string(rec.seed), FormatNumber(rec.hy_rate),
                        FormatNumber(rec.hy_given_x_rate),
                        FormatNumber(rec.hy_rate - rec.hy_given_x_rate)});
    }
    WriteSide(flags.records_path, r);
  }
  Emit(common, t);
  return kExitOk;
}

struct OptimizeFlags {
  BinaryFlags model;
  std::string method = "scan";
  std::optional<double> grid_step;
  std::vector<double> init;
  std::string trace_path;
};

int RunOptimize(const CommonFlags& common, OptimizeFlags flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "optimize");
  const GridModel model = ResolveModel(flags.model, root);
  if (sec.contains("method") && flags.method == "scan") {
    flags.method = io::Require<std::string>(sec, "method");
  }
  const SimOptions sim = ResolveSim(common, root, {100000, 4, 1, 1});
  CsvTable t;
  t.metadata = internal::SimMetadata(sim);
  t.metadata.insert(t.metadata.begin() + 1, "command: optimize " + flags.method);
  t.metadata.push_back("b_max: " + model.b_max.ToString());
  if (flags.method == "scan") {
    const double step = flags.grid_step ? *flags.grid_step
                                        : io::Get<double>(sec, "grid_step", 0.05);
    const ScanResult r = ScanPv(model, step, sim);
    t.metadata.push_back("best p_v: " + FormatNumber(r.best_p_v));
    t.columns = {"p_v", "leakage", "std_error"};
    for (const auto& pt : r.curve) {
      t.rows.push_back({FormatNumber(pt.p_v), FormatNumber(pt.leakage),
                        FormatNumber(pt.std_error)});
    }
    Emit(common, t);
    return kExitOk;
  }
  if (flags.method == "sgd") {
    SgdOptions opts;
    const io::Json s = Section(sec, "sgd");
    opts.probes = io::Get<int>(s, "probes", opts.probes);
    opts.radius = io::Get<double>(s, "radius", opts.radius);
    opts.learning_rate = io::Get<double>(s, "learning_rate", opts.learning_rate);
    opts.stop_threshold = io::Get<double>(s, "stop_threshold", opts.stop_threshold);
    opts.max_iterations = io::Get<int>(s, "max_iterations", opts.max_iterations);
    if (model.b_max.is_infinite()) throw ConfigError("sgd needs a finite b_max");
    std::vector<double> init =
        !flags.init.empty() ? flags.init
                            : io::Get<std::vector<double>>(
                                  sec, "init",
                                  std::vector<double>(model.b_max.quanta() + 1, 0.5));
    const SgdResult r = SgdBatteryConditioned(model, init, opts, sim);
    t.metadata.push_back("iterations: " + std::to_string(r.iterations));
    t.columns = {"b", "p_v"};
    for (std::size_t b = 0; b < r.p_v.size(); ++b) {
      t.rows.push_back({std::to_string(b), FormatNumber(r.p_v[b])});
    }
    t.metadata.push_back("leakage: " + FormatNumber(r.leakage) +
                         "; std_error: " + FormatNumber(r.std_error));
    if (!flags.trace_path.empty()) {
      CsvTable tr;
      tr.metadata = t.metadata;
      tr.columns = {"iteration", "p_v", "leakage", "std_error", "best_leakage"};
      for (const auto& row : r.trace) {
        tr.rows.push_back({std::to_string(row.iteration), Join(row.p_v),
                           FormatNumber(row.leakage), FormatNumber(row.std_error),
                           FormatNumber(row.best_leakage)});
      }
      WriteSide(flags.trace_path, tr);
    }
    Emit(common, t);
    return ConvergenceStatus(r.converged, "stochastic gradient descent");
  }
  if (flags.method == "three_level") {
    const double step = flags.grid_step ? *flags.grid_step
                                        : io::Get<double>(sec, "grid_step", 0.5);
    const ThreeLevelResult r = SearchThreeLevel(model, step, sim);
    t.metadata.push_back("candidates: " + std::to_string(r.evaluated));
    t.columns = {"p1", "p2", "p3", "p4", "p5", "p6", "leakage", "std_error"};
    std::vector<std::string> row;
    for (double v : r.p) row.push_back(FormatNumber(v));
    row.push_back(FormatNumber(r.leakage));
    row.push_back(FormatNumber(r.std_error));
    t.rows.push_back(row);
    Emit(common, t);
    return kExitOk;
  }
  throw ConfigError("unknown optimize method: " + flags.method);
}

struct SlbFlags {
  std::optional<double> h_x;
  std::optional<double> p_bar;
  std::optional<std::string> p_hat;
  std::vector<std::string> peaks;
};

int RunSlb(const CommonFlags& common, const SlbFlags& flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "slb");
  const double h_x = flags.h_x ? *flags.h_x : io::Require<double>(sec, "h_x");
  CsvTable t;
  t.metadata = BaseMetadata("slb");
  t.metadata.push_back(
      "differential entropies in bits; to compare with a discrete solver at "
      "quantum d, use h(X) ~ H(X_d) + log2(d)");
  t.columns = {"bound", "value"};
  std::vector<PeakAtom> atoms;
  for (const std::string& s : flags.peaks) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("--peaks expects peak:prob entries");
    atoms.push_back({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
  }
  if (atoms.empty() && sec.contains("peaks")) {
    for (const auto& a : sec.at("peaks")) {
      atoms.push_back({io::Require<double>(a, "peak"), io::Require<double>(a, "prob")});
    }
  }
  if (!atoms.empty()) {
    t.rows.push_back({"peak_random", FormatNumber(SlbPeakRandom(h_x, atoms))});
    Emit(common, t);
    return kExitOk;
  }
  double p_hat = std::numeric_limits<double>::infinity();
  if (flags.p_hat) {
    if (*flags.p_hat != "inf") p_hat = std::stod(*flags.p_hat);
  } else if (sec.contains("p_hat") && !sec.at("p_hat").is_string()) {
    p_hat = io::Require<double>(sec, "p_hat");
  }
  std::optional<double> p_bar = flags.p_bar;
  if (!p_bar && sec.contains("p_bar")) p_bar = io::Require<double>(sec, "p_bar");
  if (p_bar) {
    const TruncExpParams fit = FitTruncExp(*p_bar, p_hat);
    t.metadata.push_back("lambda0: " + FormatNumber(fit.lambda0) +
                         "; lambda1: " + FormatNumber(fit.lambda1));
    t.rows.push_back({"avg_peak", FormatNumber(SlbAvgPeak(h_x, *p_bar, p_hat))});
  } else {
    t.rows.push_back({"peak_only", FormatNumber(SlbPeakOnly(h_x, p_hat))});
  }
  Emit(common, t);
  return kExitOk;
}

int RunSweep(const CommonFlags& common, std::optional<int> figure_flag) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "sweep");
  const int figure = figure_flag ? *figure_flag : io::Require<int>(sec, "figure");
  const double tol = common.tol ? *common.tol
                                : io::Get<double>(Section(root, "solver"), "tol", 0.0);
  if (figure == 4) {
    Figure4Config base;
    const Figure4Config c = Figure4Config::FromJson(
        Section(sec, "figure4"), ResolveSim(common, root, base.sim));
    Emit(common, Figure4Csv(c, SweepFigure4(c)));
    return kExitOk;
  }
  if (figure == 5) {
    Figure5Config base;
    const Figure5Config c = Figure5Config::FromJson(
        Section(sec, "figure5"), ResolveSim(common, root, base.sim), tol);
    const auto rows = SweepFigure5(c);
    Emit(common, Figure5Csv(c, rows));
    bool converged = true;
    for (const auto& r : rows) converged = converged && r.converged;
    return ConvergenceStatus(converged, "figure 5 sweep");
  }
  if (figure == 6) {
    Figure6Config base;
    const Figure6Config c = Figure6Config::FromJson(
        Section(sec, "figure6"), ResolveSim(common, root, base.sim), tol);
    const auto rows = SweepFigure6(c);
    Emit(common, Figure6Csv(c, rows));
    bool converged = true;
    for (const auto& r : rows) converged = converged && r.converged;
    return ConvergenceStatus(converged, "figure 6 sweep");
  }
  throw ConfigError("sweep figure must be 4, 5 or 6");
}

struct IngestFlags {
  std::string input;
  std::optional<double> quantum;
  std::optional<int> alphabet_size;
  std::optional<int> column;
};

int RunIngest(const CommonFlags& common, const IngestFlags& flags) {
  const io::Json root = LoadConfig(common);
  const io::Json sec = Section(root, "ingest");
  const std::string path =
      !flags.input.empty() ? flags.input : io::Require<std::string>(sec, "path");
  const double quantum = flags.quantum ? *flags.quantum : io::Require<double>(sec, "quantum");
  const int size = flags.alphabet_size ? *flags.alphabet_size
                                       : io::Require<int>(sec, "alphabet_size");
  const int column = flags.column ? *flags.column : io::Get<int>(sec, "column", 0);
  const IngestResult r = IngestProfile(path, quantum, size, column);
  if (r.clipped_mass > 0.0) {
    std::cerr << "warning: " << FormatNumber(r.clipped_mass)
              << " of the samples exceeded the alphabet and were clipped\n";
  }
  CsvTable t;
  t.metadata = BaseMetadata("ingest");
  t.metadata.push_back("quantum: " + FormatNumber(quantum));
  t.metadata.push_back("samples: " + std::to_string(r.samples));
  t.metadata.push_back("clipped mass: " + FormatNumber(r.clipped_mass));
  t.columns = {"letter", "prob"};
  for (std::size_t i = 0; i < r.pmf.size(); ++i) {
    t.rows.push_back({std::to_string(i), FormatNumber(r.pmf[i])});
  }
  Emit(common, t);
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Smart-meter privacy leakage workbench"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  CommonFlags common;
  app.add_option("--config", common.config_path, "JSON configuration file");
  app.add_option("--out", common.out_path, "Output CSV path (default stdout)");
  app.add_option("--seeds", common.seeds, "Number of simulation seeds")
      ->check(CLI::PositiveNumber);
  app.add_option("--n", common.n, "Simulated slots per seed")->check(CLI::PositiveNumber);
  app.add_option("--tol", common.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", common.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  int status = kExitOk;

  PpfFlags ppf;
  auto* ppf_cmd = app.add_subcommand("ppf", "Privacy-power function");
  ppf_cmd->add_option("--p-x", ppf.p_x, "Demand pmf, comma separated")->delimiter(',');
  ppf_cmd->add_option("--p-bar", ppf.p_bar, "Average renewable draw (quanta)");
  ppf_cmd->add_option("--p-hat", ppf.p_hat, "Peak renewable draw (quanta)");
  ppf_cmd->add_option("--grid", ppf.grid, "Ascending p_bar grid, comma separated")
      ->delimiter(',');
  ppf_cmd->callback([&] { status = RunPpf(common, ppf); });

  ZeroFlags zero;
  auto* zero_cmd = app.add_subcommand("zero", "Zero-battery leakage");
  zero_cmd->add_option("--p-x", zero.p_x, "Demand pmf")->delimiter(',');
  zero_cmd->add_option("--p-e", zero.p_e, "Renewable pmf")->delimiter(',');
  zero_cmd->add_flag("--known", zero.known, "Renewable state visible to the observer");
  zero_cmd->add_option("--peak-cap", zero.peak_cap, "Peak draw cap (quanta)");
  zero_cmd->callback([&] { status = RunZero(common, zero); });

  BinaryCmdFlags bin;
  auto* bin_cmd = app.add_subcommand("binary", "Binary closed forms");
  bin_cmd->add_option("--q-x", bin.q_x, "Pr{X = 1}");
  bin_cmd->add_option("--p-e", bin.p_e, "Pr{E = 1}");
  bin_cmd->add_option("--p-v", bin.p_v, "Masking probability");
  bin_cmd->callback([&] { status = RunBinary(common, bin); });

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo leakage estimate");
  AddBinaryFlags(sim_cmd, sim.model);
  sim_cmd->add_option("--p-v", sim.p_v, "Battery-independent masking probability");
  sim_cmd->add_option("--records", sim.records_path, "Per-seed CSV output");
  sim_cmd->callback([&] { status = RunSimulate(common, sim); });

  OptimizeFlags opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Policy optimization");
  AddBinaryFlags(opt_cmd, opt.model);
  opt_cmd->add_option("--method", opt.method, "scan, sgd or three_level")
      ->check(CLI::IsMember({"scan", "sgd", "three_level"}));
  opt_cmd->add_option("--grid-step", opt.grid_step, "Grid step");
  opt_cmd->add_option("--init", opt.init, "Initial per-SOC p_v")->delimiter(',');
  opt_cmd->add_option("--trace", opt.trace_path, "Descent trace CSV output");
  opt_cmd->callback([&] { status = RunOptimize(common, opt); });

  SlbFlags slb;
  auto* slb_cmd = app.add_subcommand("slb", "Shannon lower bounds");
  slb_cmd->add_option("--h-x", slb.h_x, "Differential entropy of X in bits");
  slb_cmd->add_option("--p-bar", slb.p_bar, "Average draw");
  slb_cmd->add_option("--p-hat", slb.p_hat, "Peak draw or 'inf'");
  slb_cmd->add_option("--peaks", slb.peaks, "Random peak law as peak:prob,...")
      ->delimiter(',');
  slb_cmd->callback([&] { status = RunSlb(common, slb); });

  std::optional<int> figure;
  auto* sweep_cmd = app.add_subcommand("sweep", "Figure sweeps");
  sweep_cmd->add_option("--figure", figure, "4, 5 or 6");
  sweep_cmd->callback([&] { status = RunSweep(common, figure); });

  IngestFlags ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a pmf from a CSV profile");
  ingest_cmd->add_option("--input", ingest.input, "CSV file");
  ingest_cmd->add_option("--quantum", ingest.quantum, "Energy quantum");
  ingest_cmd->add_option("--alphabet-size", ingest.alphabet_size, "Alphabet size");
  ingest_cmd->add_option("--column", ingest.column, "Zero-based column index");
  ingest_cmd->callback([&] { status = RunIngest(common, ingest); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return status;
}

}  // namespace
}  // namespace smartleak

int main(int argc, char** argv) { return smartleak::Main(argc, argv); }
