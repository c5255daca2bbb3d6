#pragma once

// Scenario configuration (key = value text), named presets, initial data and the
// runner that wires a configuration to the stepper and writes CSV/snapshot output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "contactea/errors.hpp"
#include "contactea/evolution.hpp"
#include "contactea/random_fields.hpp"
#include "contactea/snapshot.hpp"

namespace contactea {

struct ScenarioConfig {
  std::string preset;
  std::optional<std::string> equation;
  std::string model;  // empty: chosen from the equation and grid
  std::optional<std::vector<std::size_t>> grid;
  std::vector<double> length;  // empty: 2π per axis (40 for reduced_1d)
  std::string initial_condition = "random_trig";
  double amplitude = 0.1;
  double mean = 1.0;
  int modes = 2;
  double width = 1.0;
  double position = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  StepperConfig stepper;
  std::optional<double> t_end;
  std::size_t cadence = 10;
  std::string out = "out";
  std::size_t particles = 0;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

inline double parse_double(const std::string& key, const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for '" + key + "': expected a number, got '" + v + "'", line);
  }
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for '" + key + "': expected a non-negative integer, got '" + v + "'", line);
  }
}

inline bool parse_bool(const std::string& key, const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid value for '" + key + "': expected true/false, got '" + v + "'", line);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "preset",  "equation",  "model",       "grid",        "length",          "initial_condition", "amplitude",
      "mean",    "modes",     "width",       "position",    "alpha",           "beta",              "dt",
      "cfl_limit", "blowup_threshold", "dealias", "cfl_policy", "t_end",       "cadence",           "out",
      "particles", "seed"};
  return keys;
}

inline const std::vector<std::string>& equation_names() {
  static const std::vector<std::string> names{"contact_ea", "camassa_holm", "quasigeostrophic", "beta_plane",
                                              "reduced_1d"};
  return names;
}

/// Sets one key from its textual value. Throws ConfigError naming the key.
inline void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                             std::size_t line = 0) {
  using namespace detail;
  if (key == "preset") {
    cfg.preset = value;
  } else if (key == "equation") {
    const auto& names = equation_names();
    if (std::find(names.begin(), names.end(), value) == names.end()) {
      throw ConfigError("invalid value for 'equation': unknown equation '" + value + "'", line);
    }
    cfg.equation = value;
  } else if (key == "model") {
    if (value != "torus3" && value != "circle" && value != "quanto_torus2") {
      throw ConfigError("invalid value for 'model': expected torus3, circle or quanto_torus2, got '" + value + "'",
                        line);
    }
    cfg.model = value;
  } else if (key == "grid") {
    std::vector<std::size_t> dims;
    for (const auto& s : split_list(value)) dims.push_back(parse_unsigned(key, s, line));
    if (dims.empty() || dims.size() > 3) throw ConfigError("invalid value for 'grid': expected N or N,N[,N]", line);
    cfg.grid = dims;
  } else if (key == "length") {
    cfg.length.clear();
    for (const auto& s : split_list(value)) cfg.length.push_back(parse_double(key, s, line));
  } else if (key == "initial_condition") {
    if (value.empty()) throw ConfigError("invalid value for 'initial_condition': empty", line);
    cfg.initial_condition = value;
  } else if (key == "amplitude") {
    cfg.amplitude = parse_double(key, value, line);
  } else if (key == "mean") {
    cfg.mean = parse_double(key, value, line);
  } else if (key == "modes") {
    cfg.modes = static_cast<int>(parse_unsigned(key, value, line));
  } else if (key == "width") {
    cfg.width = parse_double(key, value, line);
  } else if (key == "position") {
    cfg.position = parse_double(key, value, line);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value, line);
  } else if (key == "beta") {
    cfg.beta = parse_double(key, value, line);
  } else if (key == "dt") {
    cfg.stepper.dt = parse_double(key, value, line);
  } else if (key == "cfl_limit") {
    cfg.stepper.cfl_limit = parse_double(key, value, line);
  } else if (key == "blowup_threshold") {
    cfg.stepper.blowup_linf_threshold = parse_double(key, value, line);
  } else if (key == "dealias") {
    cfg.stepper.dealias = parse_bool(key, value, line);
  } else if (key == "cfl_policy") {
    if (value == "warn") {
      cfg.stepper.cfl_policy = CflPolicy::Warn;
    } else if (value == "throw") {
      cfg.stepper.cfl_policy = CflPolicy::Throw;
    } else if (value == "ignore") {
      cfg.stepper.cfl_policy = CflPolicy::Ignore;
    } else {
      throw ConfigError("invalid value for 'cfl_policy': expected warn, throw or ignore, got '" + value + "'", line);
    }
  } else if (key == "t_end") {
    cfg.t_end = parse_double(key, value, line);
  } else if (key == "cadence") {
    cfg.cadence = parse_unsigned(key, value, line);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "particles") {
    cfg.particles = parse_unsigned(key, value, line);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned(key, value, line);
  } else {
    throw ConfigError("unknown key '" + key + "'", line);
  }
}

struct Preset {
  std::string name;
  std::string description;
  std::string text;
};

/// Named scenarios; every acceptance run is one of these.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"quanto-steady", "Torus3, f0 = cos z: a quantomorphism geodesic, steady in m",
       "equation=contact_ea\nmodel=torus3\ngrid=32\ninitial_condition=cos_z\ndt=0.05\nt_end=1.0\ncadence=5\n"},
      {"torus-conservation", "Torus3 ContactEA from a smooth positive random f0; conservation laws",
       "equation=contact_ea\nmodel=torus3\ngrid=32\ninitial_condition=random_trig\nmean=1\namplitude=0.05\n"
       "modes=2\ndt=0.05\nt_end=0.5\ncadence=1\nseed=7\n"},
      {"torus-transport", "Torus3 ContactEA with 1000 Lagrangian particles; momentum transport law",
       "equation=contact_ea\nmodel=torus3\ngrid=32\ninitial_condition=random_trig\nmean=1\namplitude=0.02\n"
       "modes=1\ndt=0.0625\nt_end=0.5\ncadence=2\nparticles=1000\nseed=11\n"},
      {"qg-fplane", "f-plane quasigeostrophic flow on T^2, alpha = 1",
       "equation=quasigeostrophic\ngrid=128\ninitial_condition=random_trig\nmean=0.5\namplitude=1\nmodes=3\n"
       "alpha=1\ndt=0.01\nt_end=1.0\ncadence=10\nseed=3\n"},
      {"qg-beta", "beta-plane quasigeostrophic flow, beta = 1, psi = y sawtooth",
       "equation=beta_plane\ngrid=128\ninitial_condition=random_trig\nmean=0.5\namplitude=1\nmodes=3\n"
       "alpha=1\nbeta=1\ndt=0.004\nt_end=1.0\ncadence=10\nseed=3\n"},
      {"ch-smooth", "Camassa-Holm on the circle from smooth positive data",
       "equation=camassa_holm\ngrid=256\ninitial_condition=random_trig\nmean=1\namplitude=0.2\nmodes=3\n"
       "dt=0.005\nt_end=1.0\ncadence=20\nseed=5\n"},
      {"ch-peakon", "Camassa-Holm from a mollified unit peakon at x = 2",
       "equation=camassa_holm\ngrid=512\ninitial_condition=smoothed_peakon\namplitude=1\nwidth=0.05\n"
       "position=2\ndt=0.002\nt_end=1.0\ncadence=50\n"},
      {"reduce1d-positive", "reduced 1-D equation, nonnegative momentum (global)",
       "equation=reduced_1d\ngrid=1024\nlength=40\ninitial_condition=gaussian\nmean=0\namplitude=1\nwidth=1\n"
       "dt=0.005\nt_end=10\ncadence=20\n"},
      {"reduce1d-blowup", "reduced 1-D equation, even negative g0 (finite-time blowup)",
       "equation=reduced_1d\ngrid=1024\nlength=40\ninitial_condition=negative_even\namplitude=0.5\nwidth=2\n"
       "dt=0.001\nt_end=10\ncadence=10\n"},
  };
  return table;
}

inline const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

namespace detail {

struct RawEntry {
  std::string value;
  std::size_t line;
};

inline std::map<std::string, RawEntry> parse_lines(const std::string& text) {
  std::map<std::string, RawEntry> entries;
  const auto& keys = config_keys();
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + line + "'", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")",
                        line_no);
    }
    entries[key] = {value, line_no};
  }
  return entries;
}

}  // namespace detail

/// Checks required keys and value ranges.
inline void validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> missing;
  if (!cfg.equation) missing.push_back("equation");
  if (!cfg.grid) missing.push_back("grid");
  if (!cfg.t_end) missing.push_back("t_end");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("missing required keys: " + list);
  }
  if (!(*cfg.t_end >= 0.0)) throw ConfigError("invalid value for 't_end': must be >= 0");
  if (cfg.cadence < 1) throw ConfigError("invalid value for 'cadence': must be >= 1");
  if (!(cfg.stepper.dt > 0.0)) throw ConfigError("invalid value for 'dt': must be > 0");
  if (!(cfg.stepper.cfl_limit > 0.0 && cfg.stepper.cfl_limit <= 1.0)) {
    throw ConfigError("invalid value for 'cfl_limit': must be in (0, 1]");
  }
  if (!(cfg.stepper.blowup_linf_threshold > 0.0)) throw ConfigError("invalid value for 'blowup_threshold': must be > 0");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("invalid value for 'alpha': must be >= 0");
  if (!(cfg.width > 0.0)) throw ConfigError("invalid value for 'width': must be > 0");
  if (cfg.out.empty()) throw ConfigError("invalid value for 'out': empty path");
  if (cfg.particles > 0 && *cfg.equation == "reduced_1d") {
    throw ConfigError("invalid value for 'particles': particles are not supported for reduced_1d");
  }
}

/// Parses key = value text. A `preset` key supplies defaults that the other keys override.
/// With `check` false the required-key validation is left to the caller, which lets
/// command-line flags fill in missing keys first.
inline ScenarioConfig parse_config(const std::string& text, bool check = true) {
  const auto entries = detail::parse_lines(text);
  ScenarioConfig cfg;
  if (const auto it = entries.find("preset"); it != entries.end()) {
    try {
      cfg = parse_config(find_preset(it->second.value).text);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), it->second.line);
    }
    cfg.preset = it->second.value;
  }
  for (const auto& [key, entry] : entries) {
    if (key != "preset") set_config_value(cfg, key, entry.value, entry.line);
  }
  if (check) validate_config(cfg);
  return cfg;
}

inline ScenarioConfig preset_config(const std::string& name) { return parse_config("preset=" + name + "\n"); }

/// Applies "KEY=VAL"; used by --override.
inline void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be KEY=VAL, got '" + assignment + "'");
  const std::string key = detail::trim(std::string_view(assignment).substr(0, eq));
  const std::string value = detail::trim(std::string_view(assignment).substr(eq + 1));
  if (key == "preset") throw ConfigError("override cannot change the preset");
  set_config_value(cfg, key, value);
}

/// Serialises a config as parseable key = value text.
inline std::string config_to_text(const ScenarioConfig& cfg) {
  using detail::fmt;
  std::ostringstream os;
  if (cfg.equation) os << "equation=" << *cfg.equation << '\n';
  if (!cfg.model.empty()) os << "model=" << cfg.model << '\n';
  if (cfg.grid) {
    os << "grid=";
    for (std::size_t i = 0; i < cfg.grid->size(); ++i) os << (i ? "," : "") << (*cfg.grid)[i];
    os << '\n';
  }
  if (!cfg.length.empty()) {
    os << "length=";
    for (std::size_t i = 0; i < cfg.length.size(); ++i) os << (i ? "," : "") << fmt(cfg.length[i]);
    os << '\n';
  }
  os << "initial_condition=" << cfg.initial_condition << '\n'
     << "amplitude=" << fmt(cfg.amplitude) << '\n'
     << "mean=" << fmt(cfg.mean) << '\n'
     << "modes=" << cfg.modes << '\n'
     << "width=" << fmt(cfg.width) << '\n'
     << "position=" << fmt(cfg.position) << '\n'
     << "alpha=" << fmt(cfg.alpha) << '\n'
     << "beta=" << fmt(cfg.beta) << '\n'
     << "dt=" << fmt(cfg.stepper.dt) << '\n'
     << "cfl_limit=" << fmt(cfg.stepper.cfl_limit) << '\n'
     << "blowup_threshold=" << fmt(cfg.stepper.blowup_linf_threshold) << '\n'
     << "dealias=" << (cfg.stepper.dealias ? "true" : "false") << '\n'
     << "cfl_policy="
     << (cfg.stepper.cfl_policy == CflPolicy::Warn ? "warn" : cfg.stepper.cfl_policy == CflPolicy::Throw ? "throw"
                                                                                                         : "ignore")
     << '\n';
  if (cfg.t_end) os << "t_end=" << fmt(*cfg.t_end) << '\n';
  os << "cadence=" << cfg.cadence << '\n'
     << "out=" << cfg.out << '\n'
     << "particles=" << cfg.particles << '\n'
     << "seed=" << cfg.seed << '\n';
  return os.str();
}

/// Number of axes implied by the equation (and model).
inline std::size_t config_ndim(const ScenarioConfig& cfg) {
  const std::string& e = *cfg.equation;
  if (e == "camassa_holm" || e == "reduced_1d") return 1;
  if (e == "quasigeostrophic" || e == "beta_plane") return 2;
  if (cfg.model == "circle") return 1;
  if (cfg.model == "quanto_torus2") return 2;
  if (cfg.model.empty() && cfg.grid && cfg.grid->size() > 1) return cfg.grid->size();
  return 3;
}

inline Grid build_grid(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const std::size_t nd = config_ndim(cfg);
  std::vector<std::size_t> dims = *cfg.grid;
  if (dims.size() == 1) dims.assign(nd, dims[0]);
  if (dims.size() != nd) {
    throw ConfigError("invalid value for 'grid': " + *cfg.equation + " needs " + std::to_string(nd) + " sizes");
  }
  std::vector<double> lengths = cfg.length;
  const double default_length = *cfg.equation == "reduced_1d" ? 40.0 : two_pi;
  if (lengths.empty()) lengths.assign(nd, default_length);
  if (lengths.size() == 1) lengths.assign(nd, lengths[0]);
  if (lengths.size() != nd) throw ConfigError("invalid value for 'length': expected 1 or " + std::to_string(nd) + " values");
  try {
    return Grid(dims, lengths);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid value for 'grid': ") + e.what());
  }
}

inline EquationKind build_equation(const ScenarioConfig& cfg, const Grid& grid) {
  const std::string& e = *cfg.equation;
  try {
    if (e == "reduced_1d") return Reduced1D{grid};
    if (e == "camassa_holm") return CamassaHolm{ContactModel::circle(grid)};
    if (e == "quasigeostrophic") return Quasigeostrophic{ContactModel::quanto_torus2(grid), cfg.alpha};
    if (e == "beta_plane") {
      return BetaPlane{ContactModel::quanto_torus2(grid), cfg.alpha, cfg.beta, centered_coordinate_field(grid, 1)};
    }
    switch (grid.ndim()) {
      case 1: return ContactEA{ContactModel::circle(grid)};
      case 2: return ContactEA{ContactModel::quanto_torus2(grid)};
      default: return ContactEA{ContactModel::torus3(grid)};
    }
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("invalid model/grid combination: ") + ex.what());
  }
}

/// Periodic distance of x from c on a circle of length L.
inline double circle_distance(double x, double c, double L) {
  double d = std::fmod(x - c, L);
  if (d < 0.0) d += L;
  return std::min(d, L - d);
}

/// Initial momentum for the configured equation. Stream-function data f₀ are turned
/// into m₀ = f₀ - Δf₀ (or taken as ω₀ directly for the quasigeostrophic equations).
inline ScalarField build_initial_momentum(const ScenarioConfig& cfg, const EquationKind& eq) {
  const Grid& grid = equation_grid(eq);
  const std::string& ic = cfg.initial_condition;
  const bool qg = std::holds_alternative<Quasigeostrophic>(eq) || std::holds_alternative<BetaPlane>(eq);
  auto from_stream = [&](const ScalarField& f) { return qg ? f : f - laplacian(f); };

  if (ic.rfind("snapshot:", 0) == 0) {
    std::optional<ScalarField> loaded;
    try {
      loaded = load_snapshot(ic.substr(9));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid value for 'initial_condition': ") + e.what());
    }
    ScalarField m = std::move(*loaded);
    if (!(m.grid() == grid)) {
      throw ConfigError("invalid value for 'initial_condition': snapshot grid " + m.grid().describe() +
                        " does not match " + grid.describe());
    }
    return m;
  }
  if (ic == "random_trig") {
    ScalarField f = random_trig_polynomial(grid, cfg.modes, cfg.seed, cfg.amplitude, true);
    f += cfg.mean;
    return from_stream(f);
  }
  if (ic == "cos_z") {
    if (grid.ndim() != 3) throw ConfigError("invalid value for 'initial_condition': cos_z needs a 3-D grid");
    return from_stream(ScalarField::sample(grid, [](const Point& p) { return std::cos(p[2]); }));
  }
  if (ic == "gaussian") {
    return ScalarField::sample(grid, [&](const Point& p) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < grid.ndim(); ++a) {
        const double d = circle_distance(p[a], a == 0 ? cfg.position : 0.0, grid.length(a));
        r2 += d * d;
      }
      return cfg.mean + cfg.amplitude * std::exp(-r2 / (cfg.width * cfg.width));
    });
  }
  if (ic == "smoothed_peakon") {
    if (grid.ndim() != 1) throw ConfigError("invalid value for 'initial_condition': smoothed_peakon needs a 1-D grid");
    const double s = cfg.width, L = grid.length(0);
    return ScalarField::sample(grid, [&](const Point& p) {
      double sum = 0.0;
      for (int k = -2; k <= 2; ++k) {
        const double d = p[0] - cfg.position + k * L;
        sum += std::exp(-d * d / (2.0 * s * s));
      }
      return cfg.amplitude * sum / (std::sqrt(two_pi) * s);
    });
  }
  if (ic == "negative_even") {
    if (grid.ndim() != 1) throw ConfigError("invalid value for 'initial_condition': negative_even needs a 1-D grid");
    ScalarField g(grid);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = grid.centered_coordinate(0, i);
      g[i] = -cfg.amplitude * std::exp(-y * y / (cfg.width * cfg.width));
    }
    return g - laplacian(g);
  }
  throw ConfigError("invalid value for 'initial_condition': unknown '" + ic +
                    "' (expected random_trig, cos_z, gaussian, smoothed_peakon, negative_even or snapshot:PATH)");
}

struct ScenarioOutcome {
  RunSummary summary;
  std::filesystem::path out_dir;
  double final_reeb_linf = 0.0;
  std::optional<TransportResidual> transport;
};

/// Runs a scenario and writes diagnostics.csv, config.txt, m_initial.snap, m_final.snap
/// and, with particles, particles.csv into the output directory.
inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const Grid grid = build_grid(cfg);
  const EquationKind eq = build_equation(cfg, grid);
  const ScalarField m0 = build_initial_momentum(cfg, eq);

  const std::filesystem::path out_dir = cfg.out;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("invalid value for 'out': cannot create '" + cfg.out + "': " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream os(out_dir / name, std::ios::binary);
    if (!os) throw ConfigError("invalid value for 'out': cannot write " + (out_dir / name).string());
    return os;
  };

  {
    auto os = open("config.txt");
    os << config_to_text(cfg);
  }
  save_snapshot((out_dir / "m_initial.snap").string(), m0);

  auto diag = open("diagnostics.csv");
  diag << diagnostics_csv_header;
  std::optional<std::ofstream> particles_csv;

  RunOptions opts;
  opts.cadence = cfg.cadence;
  std::optional<ContactModel> model = equation_model(eq);
  if (cfg.particles > 0) {
    const std::size_t per_axis = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(cfg.particles), 1.0 / grid.ndim()))));
    opts.flow = seed_lattice(cfg.stepper.dealias ? dealias(m0) : m0, per_axis);
    particles_csv = open("particles.csv");
    write_particles_csv_header(*particles_csv, grid.ndim());
    log << "particles: " << opts.flow->size() << " on a " << per_axis << "-per-axis lattice\n";
  }
  const Band band = cfg.stepper.dealias ? Band(dealias_band(grid)) : Band{};
  const int n = equation_n(eq);
  opts.observers.push_back([&](const SimState&, const DiagnosticsRecord& rec, const FlowMap*) {
    diag << diagnostics_csv_row(rec);
  });
  if (particles_csv) {
    opts.observers.push_back([&](const SimState& s, const DiagnosticsRecord&, const FlowMap* flow) {
      if (!flow) return;
      const TransportResidual res = transport_residual(*flow, *model, s.m, n, band);
      write_particles_csv_rows(*particles_csv, s.t, *flow, res, grid.ndim());
    });
  }

  log << "scenario: " << equation_name(eq) << " on " << grid.describe() << ", t_end=" << *cfg.t_end
      << ", dt=" << cfg.stepper.dt << "\n";
  ScenarioOutcome outcome{run(eq, m0, cfg.stepper, *cfg.t_end, std::move(opts)), out_dir, 0.0, {}};
  const RunSummary& s = outcome.summary;
  save_snapshot((out_dir / "m_final.snap").string(), s.final_state.m);

  const DiagnosticsRecord& first = s.records.front();
  const DiagnosticsRecord& last = s.records.back();
  outcome.final_reeb_linf = last.reeb_f_linf;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  char buf[256];
  std::snprintf(buf, sizeof buf, "status: %s at t=%.6g after %zu steps (dt=%.6g)\n",
                s.status == RunStatus::Completed ? "completed" : "blowup", s.final_state.t, s.final_state.step_count,
                s.dt_used);
  log << buf;
  if (s.status == RunStatus::Blowup) log << "blowup: " << s.message << "\n";
  if (s.final_state.cfl_warnings > 0) {
    log << "warning: CFL limit " << cfg.stepper.cfl_limit << " exceeded on " << s.final_state.cfl_warnings
        << " steps\n";
  }
  std::snprintf(buf, sizeof buf, "final reeb_f_linf = %.6e\nfinal m_linf = %.6e\nbkm integral = %.6e\n",
                last.reeb_f_linf, last.m_linf, last.bkm_integral);
  log << buf;
  std::snprintf(buf, sizeof buf, "relative drift: c0 %.3e, c1 %.3e", rel(last.c0, first.c0), rel(last.c1, first.c1));
  log << buf;
  if (first.casimir_valid && last.casimir_valid) {
    std::snprintf(buf, sizeof buf, ", cm1_plus %.3e", rel(last.c_minus_plus, first.c_minus_plus));
    log << buf;
  }
  log << "\n";
  if (s.flow && model) {
    outcome.transport = transport_residual(*s.flow, *model, s.final_state.m, n, band);
    std::snprintf(buf, sizeof buf, "transport residual: max %.3e, rms %.3e\n", outcome.transport->max_abs,
                  outcome.transport->rms);
    log << buf;
  }
  log << "output: " << outcome.out_dir.string() << "\n";
  return outcome;
}

}  // namespace contactea
