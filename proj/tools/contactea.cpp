// contactea: scenario runner for the contact Euler-Arnold solvers.
//
// Exit codes: 0 success, 1 usage/config error, 2 blowup (diagnostics still written),
// 3 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contactea/peakon.hpp"
#include "contactea/scenario.hpp"
#include "contactea/verify.hpp"

namespace {

using namespace contactea;

enum Exit { kOk = 0, kUsage = 1, kBlowup = 2, kVerifyFailed = 3 };

struct ScenarioFlags {
  std::string config_path;
  std::string preset;
  std::string out;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string grid;
  std::optional<std::size_t> cadence;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
  app->add_option("--config", f.config_path, "key=value scenario file")->check(CLI::ExistingFile);
  app->add_option("--preset", f.preset, "named scenario (see `presets`)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--dt", f.dt, "time step");
  app->add_option("--t-end", f.t_end, "final time");
  app->add_option("--grid", f.grid, "grid size N or N,N[,N]");
  app->add_option("--cadence", f.cadence, "steps between diagnostics records");
  app->add_option("--seed", f.seed, "seed for random initial data");
  app->add_option("--override", f.overrides, "KEY=VAL, repeatable")->take_all();
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ScenarioConfig build_config(const ScenarioFlags& f, const std::string& default_preset = {}) {
  std::string text = f.config_path.empty() ? std::string() : read_file(f.config_path);
  const std::string preset = f.preset.empty() ? default_preset : f.preset;
  if (!preset.empty()) {
    const ScenarioConfig probe = parse_config(text, false);
    if (probe.preset.empty()) {
      text = "preset=" + preset + "\n" + text;
    } else if (!f.preset.empty() && probe.preset != f.preset) {
      throw ConfigError("--preset " + f.preset + " conflicts with preset=" + probe.preset + " in the config file");
    }
  }
  ScenarioConfig cfg = parse_config(text, false);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.dt) cfg.stepper.dt = *f.dt;
  if (f.t_end) cfg.t_end = *f.t_end;
  if (!f.grid.empty()) set_config_value(cfg, "grid", f.grid);
  if (f.cadence) cfg.cadence = *f.cadence;
  if (f.seed) cfg.seed = *f.seed;
  for (const auto& o : f.overrides) apply_override(cfg, o);
  validate_config(cfg);
  return cfg;
}

int run_command(const ScenarioConfig& cfg) {
  const ScenarioOutcome outcome = run_scenario(cfg, std::cout);
  if (outcome.summary.status == RunStatus::Blowup) {
    std::cerr << "contactea: numerical blowup: " << outcome.summary.message << "\n";
    return kBlowup;
  }
  return kOk;
}

int verify_command() {
  bool all = true;
  for (const auto& suite : verify_suites()) {
    const SuiteResult r = suite();
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  if (!all) std::cerr << "contactea: verification failed\n";
  return all ? kOk : kVerifyFailed;
}

int presets_command() {
  for (const auto& p : presets()) std::cout << p.name << "  " << p.description << "\n";
  return kOk;
}

struct PeakonFlags {
  std::size_t n = 1;
  std::vector<double> p{1.0};
  std::vector<double> q;
  double L = two_pi;
  double t_end = 1.0;
  double dt = 1e-3;
  std::string out;
};

int peakon_command(const PeakonFlags& f) {
  if (f.n == 0) throw ConfigError("--n must be >= 1");
  PeakonState s;
  s.L = f.L;
  if (f.p.size() == 1) {
    s.p.assign(f.n, f.p[0]);
  } else if (f.p.size() == f.n) {
    s.p = f.p;
  } else {
    throw ConfigError("--p needs 1 or n values");
  }
  if (f.q.empty()) {
    for (std::size_t k = 0; k < f.n; ++k) s.q.push_back(f.L * static_cast<double>(k) / static_cast<double>(f.n));
  } else if (f.q.size() == f.n) {
    s.q = f.q;
  } else {
    throw ConfigError("--q needs n values");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::optional<std::ofstream> csv;
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    csv.emplace(std::filesystem::path(f.out) / "peakons.csv");
    if (!*csv) throw ConfigError("cannot write " + f.out + "/peakons.csv");
    write_peakon_csv_header(*csv, s.size());
  }
  const double h0 = peakon_hamiltonian(s);
  double p0 = 0.0;
  for (double v : s.p) p0 += v;
  const PeakonState end = integrate_peakons(s, f.t_end, f.dt, [&](double t, const PeakonState& st) {
    if (csv) write_peakon_csv_row(*csv, t, st);
  });
  double p1 = 0.0;
  for (double v : end.p) p1 += v;
  char buf[128];
  for (std::size_t k = 0; k < end.size(); ++k) {
    std::snprintf(buf, sizeof buf, "q_%zu = %.15f  p_%zu = %.15f\n", k + 1, end.q[k], k + 1, end.p[k]);
    std::cout << buf;
  }
  std::snprintf(buf, sizeof buf, "hamiltonian drift = %.3e\nmomentum drift = %.3e\n",
                std::abs(peakon_hamiltonian(end) - h0), std::abs(p1 - p0));
  std::cout << buf;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact Euler-Arnold scenario runner"};
  app.require_subcommand(1);

  ScenarioFlags run_flags, reduce_flags;
  auto* run = app.add_subcommand("run", "run a scenario from --config and/or --preset");
  add_scenario_flags(run, run_flags);

  auto* reduce = app.add_subcommand("reduce1d", "run the reduced 1-D equation");
  add_scenario_flags(reduce, reduce_flags);
  std::string data = "positive";
  reduce->add_option("--data", data, "positive | negative (even, blowing up)")
      ->check(CLI::IsMember({"positive", "negative"}));

  PeakonFlags pk;
  auto* peakon = app.add_subcommand("peakon", "integrate the periodic N-peakon system");
  peakon->add_option("--n", pk.n, "number of peakons");
  peakon->add_option("--p", pk.p, "momenta (one value or n values)")->delimiter(',');
  peakon->add_option("--q", pk.q, "initial positions (n values; default evenly spaced)")->delimiter(',');
  peakon->add_option("--L", pk.L, "circumference");
  peakon->add_option("--t-end", pk.t_end, "final time");
  peakon->add_option("--dt", pk.dt, "time step");
  peakon->add_option("--out", pk.out, "directory for peakons.csv");

  auto* verify = app.add_subcommand("verify", "run the built-in identity suites");
  auto* list = app.add_subcommand("presets", "list named scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return run_command(build_config(run_flags));
    if (*reduce) {
      ScenarioConfig cfg =
          build_config(reduce_flags, data == "positive" ? "reduce1d-positive" : "reduce1d-blowup");
      if (*cfg.equation != "reduced_1d") throw ConfigError("reduce1d needs equation=reduced_1d");
      return run_command(cfg);
    }
    if (*peakon) return peakon_command(pk);
    if (*verify) return verify_command();
    if (*list) return presets_command();
  } catch (const ConfigError& e) {
    std::cerr << "contactea: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "contactea: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const CflViolation& e) {
    std::cerr << "contactea: " << e.what() << "\n";
    return kBlowup;
  } catch (const std::exception& e) {
    std::cerr << "contactea: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
