#pragma once

// Time integration of the momentum equations:
//   ContactEA         m_t + u(m) + (n+2) m E(f) = 0,  m = f - Δf,  u = S_θ f
//   CamassaHolm       m_t + f m_x + 2 m f_x = 0       (ContactEA with n = 0)
//   Quasigeostrophic  ω_t + {f, ω} = 0,  (Δ - α²) f = ω
//   BetaPlane         ω_t + {f, ω} = 0,  (Δ - α²) f = ω + β ψ
//   Reduced1D         φ_t = -4g² + 4g g_yy + y (g g_yyy - g_y g_yy),  φ = g - g_yy
// with classical RK4 on the stored momentum and f recovered at every stage.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "contactea/contact.hpp"
#include "contactea/diagnostics.hpp"
#include "contactea/errors.hpp"
#include "contactea/lagrangian.hpp"
#include "contactea/spectral.hpp"

namespace contactea {

struct ContactEA {
  ContactModel model;
};
struct CamassaHolm {
  ContactModel model;
};
struct Quasigeostrophic {
  ContactModel model;
  double alpha = 1.0;
};
struct BetaPlane {
  ContactModel model;
  double alpha = 1.0;
  double beta = 0.0;
  ScalarField psi;
};
struct Reduced1D {
  Grid grid;
};

using EquationKind = std::variant<ContactEA, CamassaHolm, Quasigeostrophic, BetaPlane, Reduced1D>;

inline void validate(const EquationKind& eq) {
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, CamassaHolm>) {
          if (e.model.kind() != ContactKind::CircleCH) throw std::invalid_argument("CamassaHolm needs a CircleCH model");
        } else if constexpr (std::is_same_v<T, Quasigeostrophic> || std::is_same_v<T, BetaPlane>) {
          if (e.model.kind() != ContactKind::QuantoTorus2) {
            throw std::invalid_argument("quasigeostrophic equations live on the QuantoTorus2 model");
          }
          if (!(e.alpha >= 0.0)) throw std::invalid_argument("quasigeostrophic alpha must be >= 0");
          if constexpr (std::is_same_v<T, BetaPlane>) {
            require_model_grid(e.model, e.psi, "BetaPlane psi");
            if (!std::isfinite(e.beta)) throw std::invalid_argument("BetaPlane beta must be finite");
          }
        } else if constexpr (std::is_same_v<T, Reduced1D>) {
          if (e.grid.ndim() != 1) throw std::invalid_argument("Reduced1D needs a 1-D grid");
        }
      },
      eq);
}

inline const Grid& equation_grid(const EquationKind& eq) {
  return std::visit(
      [](const auto& e) -> const Grid& {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, Reduced1D>) {
          return e.grid;
        } else {
          return e.model.grid();
        }
      },
      eq);
}

inline std::optional<ContactModel> equation_model(const EquationKind& eq) {
  return std::visit(
      [](const auto& e) -> std::optional<ContactModel> {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, Reduced1D>) {
          return std::nullopt;
        } else {
          return e.model;
        }
      },
      eq);
}

inline std::string equation_name(const EquationKind& eq) {
  static const char* names[] = {"contact_ea", "camassa_holm", "quasigeostrophic", "beta_plane", "reduced_1d"};
  return names[eq.index()];
}

/// Contact dimension parameter used for the conservation-law exponents.
inline int equation_n(const EquationKind& eq) {
  if (const auto* c = std::get_if<ContactEA>(&eq)) return c->model.n();
  if (std::holds_alternative<CamassaHolm>(eq)) return 0;
  return 1;
}

struct SimState {
  EquationKind eq;
  double t = 0.0;
  ScalarField m;
  std::size_t step_count = 0;
  double bkm_integral = 0.0;
  std::size_t cfl_warnings = 0;
};

enum class CflPolicy { Warn, Throw, Ignore };

struct StepperConfig {
  double dt = 1e-3;
  double cfl_limit = 0.4;
  double blowup_linf_threshold = 1e6;
  bool dealias = true;
  CflPolicy cfl_policy = CflPolicy::Warn;
  // Integrate with -dt; used for reversibility checks.
  bool backward = false;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("StepperConfig: dt must be > 0");
    if (!(cfl_limit > 0.0 && cfl_limit <= 1.0)) throw std::invalid_argument("StepperConfig: cfl_limit must be in (0, 1]");
    if (!(blowup_linf_threshold > 0.0)) throw std::invalid_argument("StepperConfig: blowup threshold must be > 0");
  }
};

/// Stream function recovered from the stored momentum.
inline ScalarField stream_function(const EquationKind& eq, const ScalarField& m) {
  require_same_grid(equation_grid(eq), m.grid(), "stream_function");
  return std::visit(
      [&](const auto& e) -> ScalarField {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Quasigeostrophic>) {
          return screened_poisson_solve(m, e.alpha * e.alpha);
        } else if constexpr (std::is_same_v<T, BetaPlane>) {
          ScalarField src = m;
          src.axpy(e.beta, e.psi);
          return screened_poisson_solve(src, e.alpha * e.alpha);
        } else {
          return helmholtz_inverse(m);
        }
      },
      eq);
}

/// Sawtooth coordinate y ∈ [-L/2, L/2) on a 1-D grid.
inline ScalarField centered_coordinate_field(const Grid& grid, std::size_t axis = 0) {
  ScalarField y(grid);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = grid.centered_coordinate(axis, grid.unflatten(i)[axis]);
  return y;
}

/// Velocity transporting the momentum. For Reduced1D this is y g.
inline VectorFieldComponents transport_velocity(const EquationKind& eq, const ScalarField& f) {
  if (const auto* r = std::get_if<Reduced1D>(&eq)) {
    return VectorFieldComponents({centered_coordinate_field(r->grid) * f});
  }
  return stream_velocity(*equation_model(eq), f);
}

/// E(f). For Reduced1D the full stream function is z g(y) and E = ∂_z, so E(f) = g.
inline ScalarField reeb_of_stream(const EquationKind& eq, const ScalarField& f) {
  if (std::holds_alternative<Reduced1D>(eq)) return f;
  return reeb_derivative(*equation_model(eq), f);
}

/// Direct Camassa-Holm right-hand side -f m_x - 2 m f_x.
inline ScalarField camassa_holm_rhs_direct(const ScalarField& m, bool dealias_output = true) {
  if (m.grid().ndim() != 1) throw std::invalid_argument("camassa_holm_rhs_direct: 1-D grid required");
  const Spectrum ms(m);
  Spectrum fs = ms;
  fs.apply_radial([](double k2) { return 1.0 / (1.0 + k2); });
  const ScalarField f = fs.to_field();
  const ScalarField fx = fs.differentiate(0).to_field();
  Spectrum mxs = ms;
  const ScalarField mx = mxs.differentiate(0).to_field();
  ScalarField out(m.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -f[i] * mx[i] - 2.0 * m[i] * fx[i];
  return dealias_output ? dealias(out) : out;
}

/// Reduced 1-D right-hand side for φ = g - g_yy.
inline ScalarField reduced_1d_rhs(const ScalarField& phi, bool dealias_output = true) {
  const Grid& grid = phi.grid();
  Spectrum gs(phi);
  gs.apply_radial([](double k2) { return 1.0 / (1.0 + k2); });
  const ScalarField g = gs.to_field();
  Spectrum d1 = gs, d2 = gs, d3 = gs;
  const ScalarField gy = d1.differentiate(0, 1).to_field();
  const ScalarField gyy = d2.differentiate(0, 2).to_field();
  const ScalarField gyyy = d3.differentiate(0, 3).to_field();
  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = grid.centered_coordinate(0, i);
    out[i] = -4.0 * g[i] * g[i] + 4.0 * g[i] * gyy[i] + y * (g[i] * gyyy[i] - gy[i] * gyy[i]);
  }
  return dealias_output ? dealias(out) : out;
}

/// Right-hand side together with the quantities the stepper needs at the same stage.
struct RhsEvaluation {
  ScalarField dmdt;
  ScalarField f;
  double reeb_linf = 0.0;
};

inline RhsEvaluation evaluate_rhs(const EquationKind& eq, const ScalarField& m, bool dealias_output = true) {
  require_same_grid(equation_grid(eq), m.grid(), "rhs");
  if (std::holds_alternative<Reduced1D>(eq)) {
    ScalarField g = helmholtz_inverse(m);
    const double gl = g.max_abs();
    return {reduced_1d_rhs(m, dealias_output), std::move(g), gl};
  }
  const ContactModel model = *equation_model(eq);
  ScalarField f = stream_function(eq, m);
  ScalarField out(m.grid());
  double reeb_linf = 0.0;
  if (model.kind() == ContactKind::QuantoTorus2) {
    // Both the quotient Euler-Arnold flow and the QG variants are -{f, m}.
    out = -directional_derivative(hamiltonian_field(model, f), m);
  } else {
    const ScalarField ef = reeb_derivative(model, f);
    reeb_linf = ef.max_abs();
    out = -directional_derivative(contact_vector_field(model, f), m);
    out.axpy(-(model.n() + 2.0), m * ef);
  }
  return {dealias_output ? dealias(out) : std::move(out), std::move(f), reeb_linf};
}

/// dm/dt for the state's equation.
inline ScalarField rhs(const EquationKind& eq, const ScalarField& m, bool dealias_output = true) {
  if (std::holds_alternative<CamassaHolm>(eq)) return camassa_holm_rhs_direct(m, dealias_output);
  return evaluate_rhs(eq, m, dealias_output).dmdt;
}

inline ScalarField rhs(const SimState& state) {
  if (!state.m.all_finite()) {
    throw BlowupError("non-finite momentum", state.t, state.m.max_abs(), state.bkm_integral);
  }
  ScalarField out = rhs(state.eq, state.m);
  if (!out.all_finite()) {
    throw BlowupError("non-finite right-hand side", state.t, state.m.max_abs(), state.bkm_integral);
  }
  return out;
}

/// dt ‖u‖∞ / h for the transport velocity at `m`.
inline double courant_number(const EquationKind& eq, const ScalarField& m, double dt) {
  const ScalarField f = stream_function(eq, m);
  return std::abs(dt) * transport_velocity(eq, f).max_magnitude() / m.grid().min_spacing();
}

namespace detail {

// Stage evaluation shared by the plain and particle-coupled steppers.
inline RhsEvaluation stage(const SimState& s, const ScalarField& m, bool dealias_output, double t) {
  if (!m.all_finite()) throw BlowupError("non-finite momentum at RK stage", t, m.max_abs(), s.bkm_integral);
  RhsEvaluation ev = std::holds_alternative<CamassaHolm>(s.eq)
                         ? RhsEvaluation{camassa_holm_rhs_direct(m, dealias_output), helmholtz_inverse(m), 0.0}
                         : evaluate_rhs(s.eq, m, dealias_output);
  if (std::holds_alternative<CamassaHolm>(s.eq)) ev.reeb_linf = partial_derivative(ev.f, 0).max_abs();
  if (!ev.dmdt.all_finite()) throw BlowupError("non-finite right-hand side", t, m.max_abs(), s.bkm_integral);
  return ev;
}

inline SimState step_impl(SimState state, const StepperConfig& cfg, FlowMap* flow, Band band) {
  cfg.validate();
  const double dt = cfg.backward ? -cfg.dt : cfg.dt;
  const double t0 = state.t;
  if (!state.m.all_finite()) throw BlowupError("non-finite momentum", t0, state.m.max_abs(), state.bkm_integral);

  if (cfg.cfl_policy != CflPolicy::Ignore) {
    const double c = courant_number(state.eq, state.m, dt);
    if (c > cfg.cfl_limit) {
      if (cfg.cfl_policy == CflPolicy::Throw) {
        throw CflViolation("CFL number " + std::to_string(c) + " exceeds limit " + std::to_string(cfg.cfl_limit), c);
      }
      ++state.cfl_warnings;
    }
  }

  std::optional<ContactModel> model;
  if (flow) {
    model = equation_model(state.eq);
    if (!model) throw std::invalid_argument("particle tracking is not defined for the reduced 1-D equation");
    flow->validate();
  }

  std::array<ParticleRates, 4> pk;
  std::vector<Point> pos;
  std::vector<double> lam;

  const RhsEvaluation k1 = stage(state, state.m, cfg.dealias, t0);
  state.bkm_integral += std::abs(dt) * k1.reeb_linf;
  if (flow) pk[0] = particle_rates(*model, k1.f, flow->positions, band);

  ScalarField ms = state.m;
  ms.axpy(0.5 * dt, k1.dmdt);
  if (flow) displace(*flow, pk[0], 0.5 * dt, pos, lam);
  const RhsEvaluation k2 = stage(state, ms, cfg.dealias, t0 + 0.5 * dt);
  if (flow) pk[1] = particle_rates(*model, k2.f, pos, band);

  ms = state.m;
  ms.axpy(0.5 * dt, k2.dmdt);
  if (flow) displace(*flow, pk[1], 0.5 * dt, pos, lam);
  const RhsEvaluation k3 = stage(state, ms, cfg.dealias, t0 + 0.5 * dt);
  if (flow) pk[2] = particle_rates(*model, k3.f, pos, band);

  ms = state.m;
  ms.axpy(dt, k3.dmdt);
  if (flow) displace(*flow, pk[2], dt, pos, lam);
  const RhsEvaluation k4 = stage(state, ms, cfg.dealias, t0 + dt);
  if (flow) pk[3] = particle_rates(*model, k4.f, pos, band);

  ScalarField next = state.m;
  next.axpy(dt / 6.0, k1.dmdt);
  next.axpy(dt / 3.0, k2.dmdt);
  next.axpy(dt / 3.0, k3.dmdt);
  next.axpy(dt / 6.0, k4.dmdt);

  state.t = t0 + dt;
  state.step_count += 1;
  const double linf = next.max_abs();
  if (!next.all_finite() || linf > cfg.blowup_linf_threshold) {
    throw BlowupError("momentum exceeded blowup threshold", state.t, linf, state.bkm_integral);
  }
  state.m = std::move(next);
  if (flow) *flow = combine_rk4(*flow, state.m.grid(), pk, dt);
  return state;
}

}  // namespace detail

/// One classical RK4 step. Throws BlowupError when ‖m‖∞ exceeds the threshold or
/// a stage turns non-finite.
inline SimState step_rk4(SimState state, const StepperConfig& cfg) {
  return detail::step_impl(std::move(state), cfg, nullptr, {});
}

/// RK4 step with Lagrangian particles advanced on the same stage fields.
inline SimState step_rk4(SimState state, const StepperConfig& cfg, FlowMap& flow, Band band = {}) {
  return detail::step_impl(std::move(state), cfg, &flow, band);
}

/// Diagnostics for a state, carrying its accumulated BKM integral.
inline DiagnosticsRecord diagnostics_for(const SimState& state) {
  const ScalarField f = stream_function(state.eq, state.m);
  DiagnosticsRecord rec = conserved_quantities(state.m, f, equation_n(state.eq));
  rec.t = state.t;
  rec.bkm_integral = state.bkm_integral;
  rec.reeb_f_linf = reeb_of_stream(state.eq, f).max_abs();
  return rec;
}

enum class RunStatus { Completed, Blowup };

using Observer = std::function<void(const SimState&, const DiagnosticsRecord&, const FlowMap*)>;

struct RunOptions {
  std::size_t cadence = 1;
  std::optional<FlowMap> flow;
  // Wavenumber box for particle interpolation; defaults to the 2/3-rule band when dealiasing.
  Band particle_band;
  std::vector<Observer> observers;
};

struct RunSummary {
  SimState final_state;
  RunStatus status = RunStatus::Completed;
  std::vector<DiagnosticsRecord> records;
  std::optional<FlowMap> flow;
  std::optional<double> blowup_time;
  double blowup_m_linf = 0.0;
  std::string message;
  double dt_used = 0.0;
};

/// Integrates from t = 0 to t_end with a uniform step no larger than cfg.dt.
/// A blowup ends the run with status Blowup and the last good state.
inline RunSummary run(const EquationKind& eq, const ScalarField& m0, const StepperConfig& cfg, double t_end,
                      RunOptions options = {}) {
  validate(eq);
  cfg.validate();
  if (!(t_end >= 0.0)) throw std::invalid_argument("run: t_end must be >= 0");
  if (options.cadence == 0) throw std::invalid_argument("run: cadence must be >= 1");
  require_same_grid(equation_grid(eq), m0.grid(), "run");

  RunSummary summary{SimState{eq, 0.0, cfg.dealias ? dealias(m0) : m0}, RunStatus::Completed, {}, {}, {}, 0.0, {}, 0.0};
  SimState& state = summary.final_state;
  std::optional<FlowMap> flow = std::move(options.flow);
  Band band = options.particle_band;
  if (!band && cfg.dealias) band = dealias_band(m0.grid());

  const std::size_t steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9)) : 0;
  StepperConfig step_cfg = cfg;
  if (steps > 0) step_cfg.dt = t_end / static_cast<double>(steps);
  summary.dt_used = steps > 0 ? step_cfg.dt : 0.0;

  auto observe = [&]() {
    DiagnosticsRecord rec = diagnostics_for(state);
    summary.records.push_back(rec);
    for (const auto& obs : options.observers) obs(state, rec, flow ? &*flow : nullptr);
  };

  observe();
  for (std::size_t s = 0; s < steps; ++s) {
    try {
      state = flow ? step_rk4(state, step_cfg, *flow, band) : step_rk4(state, step_cfg);
      state.t = static_cast<double>(s + 1) * step_cfg.dt;
    } catch (const BlowupError& e) {
      summary.status = RunStatus::Blowup;
      summary.blowup_time = e.t();
      summary.blowup_m_linf = e.m_linf();
      summary.message = e.what();
      if (summary.records.empty() || summary.records.back().t != state.t) observe();
      break;
    }
    if (state.step_count % options.cadence == 0 || s + 1 == steps) observe();
  }
  summary.flow = std::move(flow);
  return summary;
}

}  // namespace contactea
