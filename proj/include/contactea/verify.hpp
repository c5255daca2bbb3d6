#pragma once

// Built-in identity suites run by `contactea verify`.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "contactea/contact.hpp"
#include "contactea/evolution.hpp"
#include "contactea/peakon.hpp"
#include "contactea/random_fields.hpp"

namespace contactea {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

/// div(S_θ f) = (n+1) E(f) on Torus3 and the circle, and S_θ(1) = E.
inline SuiteResult verify_operator_identities(std::size_t samples = 20, std::uint64_t seed = 1) {
  const ContactModel torus = ContactModel::torus3(Grid::uniform(3, 32));
  const ContactModel circle = ContactModel::circle(Grid::uniform(1, 64));
  std::mt19937_64 rng(seed);
  double div_err = 0.0, div_err_1d = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const ScalarField f = random_trig_polynomial(torus.grid(), 3, rng);
    ScalarField r = divergence_of_contact_field(torus, f);
    r.axpy(-2.0, reeb_derivative(torus, f));
    div_err = std::max(div_err, r.max_abs());
    const ScalarField g = random_trig_polynomial(circle.grid(), 3, rng);
    ScalarField r1 = divergence_of_contact_field(circle, g);
    r1 -= reeb_derivative(circle, g);
    div_err_1d = std::max(div_err_1d, r1.max_abs());
  }
  const auto one = contact_vector_field(torus, ScalarField::constant(torus.grid(), 1.0));
  const auto e = reeb_field(torus);
  double reeb_err = 0.0;
  for (std::size_t a = 0; a < 3; ++a) reeb_err = std::max(reeb_err, max_abs_diff(one[a], e[a]));
  const bool ok = div_err <= 1e-10 && div_err_1d <= 1e-10 && reeb_err <= 1e-12;
  return {"operator-identities", ok,
          "div law T3 " + detail::sci(div_err) + ", S1 " + detail::sci(div_err_1d) + "; S(1) - E " +
              detail::sci(reeb_err)};
}

/// Antisymmetry and Jacobi identity of the contact bracket on Torus3.
inline SuiteResult verify_bracket(std::size_t triples = 5, std::uint64_t seed = 2) {
  const ContactModel model = ContactModel::torus3(Grid::uniform(3, 32));
  std::mt19937_64 rng(seed);
  double anti = 0.0, jacobi = 0.0;
  for (std::size_t s = 0; s < triples; ++s) {
    const ScalarField f = random_trig_polynomial(model.grid(), 2, rng);
    const ScalarField g = random_trig_polynomial(model.grid(), 2, rng);
    const ScalarField h = random_trig_polynomial(model.grid(), 2, rng);
    const ScalarField fg = contact_poisson(model, f, g);
    anti = std::max(anti, (fg + contact_poisson(model, g, f)).max_abs());
    const ScalarField j = contact_poisson(model, f, contact_poisson(model, g, h)) +
                          contact_poisson(model, g, contact_poisson(model, h, f)) + contact_poisson(model, h, fg);
    jacobi = std::max(jacobi, j.max_abs());
  }
  return {"contact-bracket", anti <= 1e-9 && jacobi <= 1e-7,
          "antisymmetry " + detail::sci(anti) + ", Jacobi " + detail::sci(jacobi)};
}

/// ContactEA with n = 0 against the direct Camassa-Holm right-hand side.
inline SuiteResult verify_ch_reduction(std::size_t states = 50, std::uint64_t seed = 3) {
  const Grid grid = Grid::uniform(1, 256);
  const EquationKind ea = ContactEA{ContactModel::circle(grid)};
  std::mt19937_64 rng(seed);
  double err = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    const ScalarField f = random_trig_polynomial(grid, 8, rng);
    const ScalarField m = dealias(f - laplacian(f));
    err = std::max(err, max_abs_diff(rhs(ea, m), camassa_holm_rhs_direct(m)));
  }
  return {"ch-reduction", err <= 1e-10, "max |rhs_EA - rhs_CH| " + detail::sci(err)};
}

/// Closed-form checks of the steady singular shear f = cosh z.
inline SuiteResult verify_steady_shear() {
  const SteadyShearReport r = steady_shear_verify(Grid::uniform(3, 32));
  return {"steady-shear", r.passed(),
          std::to_string(r.samples) + " samples; velocity " + detail::sci(r.velocity_mismatch) + ", f - f_zz " +
              detail::sci(r.momentum_residual) + ", jump error " + detail::sci(r.jump_error)};
}

/// Periodic Green function against its Fourier series and the line kernel.
inline SuiteResult verify_green_function() {
  const double L = two_pi;
  double series_err = 0.0;
  for (double x : {0.0, 0.3, 1.0, 2.5, std::numbers::pi}) {
    // Σ_k cos(kx)/(1+k²) / (2π), tail beyond K bounded by 1/(πK).
    double s = 1.0;
    for (int k = 1; k <= 2000000; ++k) s += 2.0 * std::cos(k * x) / (1.0 + double(k) * k);
    series_err = std::max(series_err, std::abs(green_periodic(x, L) - s / L));
  }
  double line_err = 0.0;
  for (int i = -300; i <= 300; ++i) {
    const double x = i * 0.01;
    line_err = std::max(line_err, std::abs(green_periodic(x, 20.0) - 0.5 * std::exp(-std::abs(x))));
  }
  return {"green-function", series_err <= 1e-6 && line_err <= 1e-6,
          "Fourier series " + detail::sci(series_err) + ", L=20 vs line kernel " + detail::sci(line_err)};
}

inline std::vector<std::function<SuiteResult()>> verify_suites() {
  return {[] { return verify_operator_identities(); }, [] { return verify_bracket(); },
          [] { return verify_ch_reduction(); }, [] { return verify_steady_shear(); },
          [] { return verify_green_function(); }};
}

}  // namespace contactea
