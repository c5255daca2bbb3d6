#pragma once

// Singular-momentum solutions.
//
// Periodic Camassa-Holm peakons m = Σ p_k δ(x - q_k) on a circle of length L, with
// the Green function of (1 - ∂²) summed over periods:
//   G(x) = cosh(L/2 - d) / (2 sinh(L/2)),  d = circle distance of x from 0,
// and the Hamiltonian system
//   q̇_k = Σ_j p_j G(q_k - q_j),   ṗ_k = -p_k Σ_j p_j G'(q_k - q_j),  G'(0) := 0.
//
// The steady singular shear on T³: f = cosh z on (-π, π), whose momentum f - f_zz
// vanishes off the sheet z = ±π.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "contactea/contact.hpp"
#include "contactea/grid.hpp"

namespace contactea {

namespace detail {
inline void require_positive_length(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("periodic Green function: L must be > 0");
}
// x folded into [0, L).
inline double fold(double x, double L) {
  double s = std::fmod(x, L);
  if (s < 0.0) s += L;
  if (s >= L) s = 0.0;
  return s;
}
}  // namespace detail

/// Periodic Green function of 1 - ∂² on a circle of length L.
inline double green_periodic(double x, double L) {
  detail::require_positive_length(L);
  const double s = detail::fold(x, L);
  const double d = std::min(s, L - s);
  // cosh(L/2 - d)/(2 sinh(L/2)) written without overflow for large L.
  return (std::exp(-d) + std::exp(d - L)) / (2.0 * (1.0 - std::exp(-L)));
}

/// G'(x), odd, with the principal value G'(0) = G'(L/2) = 0.
inline double green_periodic_prime(double x, double L) {
  detail::require_positive_length(L);
  const double s = detail::fold(x, L);
  if (s == 0.0 || 2.0 * s == L) return 0.0;
  const double d = std::min(s, L - s);
  const double mag = (std::exp(-d) - std::exp(d - L)) / (2.0 * (1.0 - std::exp(-L)));
  return s < 0.5 * L ? -mag : mag;
}

struct PeakonState {
  std::vector<double> q;
  std::vector<double> p;
  double L = two_pi;

  std::size_t size() const noexcept { return q.size(); }

  void validate() const {
    if (q.empty()) throw std::invalid_argument("PeakonState: at least one peakon required");
    if (q.size() != p.size()) throw std::invalid_argument("PeakonState: q and p differ in length");
    detail::require_positive_length(L);
  }

  void wrap() {
    for (double& x : q) x = detail::fold(x, L);
  }
};

struct PeakonRates {
  std::vector<double> dq;
  std::vector<double> dp;
};

inline PeakonRates peakon_rhs(const PeakonState& s) {
  s.validate();
  const std::size_t n = s.size();
  PeakonRates r{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    double v = 0.0, force = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = s.q[k] - s.q[j];
      v += s.p[j] * green_periodic(dx, s.L);
      force += s.p[j] * green_periodic_prime(dx, s.L);
    }
    r.dq[k] = v;
    r.dp[k] = -s.p[k] * force;
  }
  return r;
}

/// H = ½ Σ_{j,k} p_j p_k G(q_j - q_k).
inline double peakon_hamiltonian(const PeakonState& s) {
  s.validate();
  double h = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (std::size_t k = 0; k < s.size(); ++k) h += s.p[j] * s.p[k] * green_periodic(s.q[j] - s.q[k], s.L);
  }
  return 0.5 * h;
}

/// Velocity u(x) = Σ p_k G(x - q_k).
inline double peakon_velocity(const PeakonState& s, double x) {
  double u = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) u += s.p[k] * green_periodic(x - s.q[k], s.L);
  return u;
}

/// One RK4 step. Positions are unwrapped during the stages and wrapped at the end.
inline PeakonState peakon_step_rk4(const PeakonState& s, double dt) {
  auto shifted = [&](const PeakonRates& r, double h) {
    PeakonState o = s;
    for (std::size_t k = 0; k < s.size(); ++k) {
      o.q[k] += h * r.dq[k];
      o.p[k] += h * r.dp[k];
    }
    return o;
  };
  const PeakonRates k1 = peakon_rhs(s);
  const PeakonRates k2 = peakon_rhs(shifted(k1, 0.5 * dt));
  const PeakonRates k3 = peakon_rhs(shifted(k2, 0.5 * dt));
  const PeakonRates k4 = peakon_rhs(shifted(k3, dt));
  PeakonState o = s;
  for (std::size_t k = 0; k < s.size(); ++k) {
    o.q[k] += dt / 6.0 * (k1.dq[k] + 2.0 * k2.dq[k] + 2.0 * k3.dq[k] + k4.dq[k]);
    o.p[k] += dt / 6.0 * (k1.dp[k] + 2.0 * k2.dp[k] + 2.0 * k3.dp[k] + k4.dp[k]);
  }
  o.wrap();
  return o;
}

/// Integrates to t_end with a uniform step no larger than dt; `observer(t, state)` is
/// called at t = 0 and after every step.
inline PeakonState integrate_peakons(PeakonState s, double t_end, double dt,
                                     const std::function<void(double, const PeakonState&)>& observer = {}) {
  s.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_peakons: dt must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("integrate_peakons: t_end must be >= 0");
  const std::size_t steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)) : 0;
  const double h = steps ? t_end / static_cast<double>(steps) : 0.0;
  s.wrap();
  if (observer) observer(0.0, s);
  for (std::size_t i = 0; i < steps; ++i) {
    s = peakon_step_rk4(s, h);
    if (observer) observer(static_cast<double>(i + 1) * h, s);
  }
  return s;
}

inline void write_peakon_csv_header(std::ostream& os, std::size_t n) {
  os << 't';
  for (std::size_t k = 1; k <= n; ++k) os << ",q_" << k;
  for (std::size_t k = 1; k <= n; ++k) os << ",p_" << k;
  os << '\n';
}

inline void write_peakon_csv_row(std::ostream& os, double t, const PeakonState& s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  os << buf;
  for (double v : s.q) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    os << buf;
  }
  for (double v : s.p) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    os << buf;
  }
  os << '\n';
}

/// Result of checking the steady singular shear f = cosh z on T³.
struct SteadyShearReport {
  std::size_t samples = 0;
  double momentum_residual = 0.0;    // max |f - f_zz| off the sheet
  double velocity_mismatch = 0.0;    // max |closed form - S_θ f| off the sheet
  double max_z_component = 0.0;      // max |u_z|
  double limit_error_minus = 0.0;    // |u(z → -π⁺) - (sinh π, -cosh π)|
  double limit_error_plus = 0.0;     // |u(z → π⁻) - (-sinh π, -cosh π)|
  double jump_x = 0.0;               // u_x(-π⁺) - u_x(π⁻)
  double jump_error = 0.0;           // |jump_x - 2 sinh π|

  bool passed(double tol = 1e-8) const {
    return samples > 0 && momentum_residual <= 1e-10 && velocity_mismatch <= tol && max_z_component == 0.0 &&
           limit_error_minus <= 1e-12 * std::cosh(std::numbers::pi) &&
           limit_error_plus <= 1e-12 * std::cosh(std::numbers::pi) && jump_error <= 1e-12 * std::cosh(std::numbers::pi);
  }
};

/// Closed-form velocity of the steady shear at height z ∈ (-π, π).
inline std::array<double, 3> steady_shear_velocity(double z) {
  return {std::sin(z) * std::cosh(z) + std::sinh(z) * std::cos(z),
          std::cosh(z) * std::cos(z) - std::sinh(z) * std::sin(z), 0.0};
}

/// Samples the grid nodes with |z| < π - band and checks the closed-form shear
/// solution against the Torus3 frame; also checks the one-sided limits at the sheet.
inline SteadyShearReport steady_shear_verify(const Grid& grid, double band = 0.1) {
  const ContactModel model = ContactModel::torus3(grid);
  const double pi = std::numbers::pi;
  SteadyShearReport rep;
  for (std::size_t i = 0; i < grid.total(); ++i) {
    const Point node = grid.node(i);
    double z = node[2];
    if (z >= pi) z -= two_pi;  // representative in [-π, π)
    if (std::abs(z) >= pi - band) continue;
    ++rep.samples;
    const double f = std::cosh(z), fz = std::sinh(z), fzz = std::cosh(z);
    rep.momentum_residual = std::max(rep.momentum_residual, std::abs(f - fzz));
    PointJet jet;
    jet.f = f;
    jet.grad = {0.0, 0.0, fz};
    const auto frame = frame_velocity(model.kind(), Point{node[0], node[1], z}, jet);
    const auto closed = steady_shear_velocity(z);
    for (std::size_t a = 0; a < 3; ++a) {
      rep.velocity_mismatch = std::max(rep.velocity_mismatch, std::abs(frame.u[a] - closed[a]));
    }
    rep.max_z_component = std::max({rep.max_z_component, std::abs(frame.u[2]), std::abs(closed[2])});
  }
  const auto lo = steady_shear_velocity(-pi);
  const auto hi = steady_shear_velocity(pi);
  rep.limit_error_minus = std::hypot(lo[0] - std::sinh(pi), lo[1] + std::cosh(pi));
  rep.limit_error_plus = std::hypot(hi[0] + std::sinh(pi), hi[1] + std::cosh(pi));
  rep.jump_x = lo[0] - hi[0];
  rep.jump_error = std::abs(rep.jump_x - 2.0 * std::sinh(pi));
  return rep;
}

}  // namespace contactea
