#pragma once

// Concrete contact manifolds on flat periodic boxes and their operators:
// Reeb derivative E(f), contact vector field S_θ f, contact Poisson bracket,
// momentum operator m = f - Δf and the divergence law div(S_θ f) = (n+1) E(f).
//
// Frames used:
//   CircleCH      θ = dx on S¹,                 E = ∂x,                  S_θ f = f ∂x
//   Torus3        θ = sin z dx + cos z dy on T³, E = sin z ∂x + cos z ∂y,
//                 S_θ f = (f sin z + f_z cos z, f cos z - f_z sin z, f_y sin z - f_x cos z)
//   QuantoTorus2  the quotient T² of a regular contact 3-manifold by Reeb orbits;
//                 functions are Reeb-invariant, brackets are symplectic.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contactea/errors.hpp"
#include "contactea/grid.hpp"
#include "contactea/spectral.hpp"

namespace contactea {

enum class ContactKind { CircleCH, Torus3, QuantoTorus2 };

inline const char* to_string(ContactKind k) {
  switch (k) {
    case ContactKind::CircleCH: return "CircleCH";
    case ContactKind::Torus3: return "Torus3";
    case ContactKind::QuantoTorus2: return "QuantoTorus2";
  }
  return "?";
}

class ContactModel {
 public:
  static ContactModel circle(Grid grid) { return ContactModel(ContactKind::CircleCH, std::move(grid)); }
  static ContactModel torus3(Grid grid) { return ContactModel(ContactKind::Torus3, std::move(grid)); }
  static ContactModel quanto_torus2(Grid grid) { return ContactModel(ContactKind::QuantoTorus2, std::move(grid)); }

  ContactModel(ContactKind kind, Grid grid) : kind_(kind), grid_(std::move(grid)) {
    const std::size_t want = kind == ContactKind::CircleCH ? 1 : kind == ContactKind::Torus3 ? 3 : 2;
    if (grid_.ndim() != want) {
      throw std::invalid_argument(std::string("ContactModel: ") + to_string(kind) + " needs a " +
                                  std::to_string(want) + "-D grid, got " + std::to_string(grid_.ndim()) + "-D");
    }
    if (kind == ContactKind::Torus3) {
      for (std::size_t a = 0; a < 3; ++a) {
        if (std::abs(grid_.length(a) - two_pi) > 1e-14) {
          throw std::invalid_argument("ContactModel: Torus3 requires all periods equal to 2*pi");
        }
      }
    }
  }

  ContactKind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Contact dimension parameter n (the manifold has dimension 2n + 1).
  int n() const noexcept { return kind_ == ContactKind::CircleCH ? 0 : 1; }

  /// Exponent r = (n+1)/(n+2) of the C_{-1} conservation law.
  double casimir_exponent() const noexcept { return (n() + 1.0) / (n() + 2.0); }

 private:
  ContactKind kind_;
  Grid grid_;
};

inline void require_model_grid(const ContactModel& model, const ScalarField& f, const char* where) {
  require_same_grid(model.grid(), f.grid(), where);
}

/// z coordinate of every node of a Torus3 grid, as sin z and cos z fields.
inline std::pair<ScalarField, ScalarField> torus_frame_trig(const Grid& grid) {
  return {ScalarField::sample(grid, [](const Point& p) { return std::sin(p[2]); }),
          ScalarField::sample(grid, [](const Point& p) { return std::cos(p[2]); })};
}

/// Value and first derivatives of a function at one point.
struct PointJet {
  double f = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
};

/// Contact (or Hamiltonian) velocity and Reeb derivative at one point from the
/// pointwise jet of the stream function. Shared by grid operators and particles.
struct PointVelocity {
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double reeb = 0.0;
};

inline PointVelocity frame_velocity(ContactKind kind, const Point& x, const PointJet& j) {
  PointVelocity v;
  switch (kind) {
    case ContactKind::CircleCH:
      v.u[0] = j.f;
      v.reeb = j.grad[0];
      break;
    case ContactKind::Torus3: {
      const double s = std::sin(x[2]), c = std::cos(x[2]);
      v.u[0] = j.f * s + j.grad[2] * c;
      v.u[1] = j.f * c - j.grad[2] * s;
      v.u[2] = j.grad[1] * s - j.grad[0] * c;
      v.reeb = s * j.grad[0] + c * j.grad[1];
      break;
    }
    case ContactKind::QuantoTorus2:
      v.u[0] = -j.grad[1];
      v.u[1] = j.grad[0];
      v.reeb = 0.0;
      break;
  }
  return v;
}

/// E(f).
inline ScalarField reeb_derivative(const ContactModel& model, const ScalarField& f) {
  require_model_grid(model, f, "reeb_derivative");
  switch (model.kind()) {
    case ContactKind::CircleCH:
      return partial_derivative(f, 0);
    case ContactKind::Torus3: {
      const auto [sz, cz] = torus_frame_trig(model.grid());
      return sz * partial_derivative(f, 0) + cz * partial_derivative(f, 1);
    }
    case ContactKind::QuantoTorus2:
      return ScalarField(model.grid());
  }
  throw UnsupportedKind("reeb_derivative: unknown model kind");
}

/// Components of the Reeb field E on the grid.
inline VectorFieldComponents reeb_field(const ContactModel& model) {
  const Grid& g = model.grid();
  switch (model.kind()) {
    case ContactKind::CircleCH:
      return VectorFieldComponents({ScalarField::constant(g, 1.0)});
    case ContactKind::Torus3: {
      auto [sz, cz] = torus_frame_trig(g);
      return VectorFieldComponents({std::move(sz), std::move(cz), ScalarField(g)});
    }
    case ContactKind::QuantoTorus2:
      break;
  }
  throw UnsupportedKind("reeb_field: the Reeb direction is quotiented out on QuantoTorus2");
}

/// u = S_θ f. Multiplication by sin z / cos z shifts z-wavenumbers by one and is not truncated.
inline VectorFieldComponents contact_vector_field(const ContactModel& model, const ScalarField& f) {
  require_model_grid(model, f, "contact_vector_field");
  switch (model.kind()) {
    case ContactKind::CircleCH:
      return VectorFieldComponents({f});
    case ContactKind::Torus3: {
      const auto [sz, cz] = torus_frame_trig(model.grid());
      const auto g = gradient(f);
      ScalarField ux = f * sz + g[2] * cz;
      ScalarField uy = f * cz - g[2] * sz;
      ScalarField uz = g[1] * sz - g[0] * cz;
      return VectorFieldComponents({std::move(ux), std::move(uy), std::move(uz)});
    }
    case ContactKind::QuantoTorus2:
      break;
  }
  throw UnsupportedKind("contact_vector_field: QuantoTorus2 uses hamiltonian_field");
}

/// Symplectic gradient (-∂_y f, ∂_x f) on the Boothby-Wang quotient T².
inline VectorFieldComponents hamiltonian_field(const ContactModel& model, const ScalarField& f) {
  if (model.kind() != ContactKind::QuantoTorus2) {
    throw UnsupportedKind(std::string("hamiltonian_field: defined only on QuantoTorus2, not ") +
                          to_string(model.kind()));
  }
  require_model_grid(model, f, "hamiltonian_field");
  auto g = gradient(f);
  return VectorFieldComponents({-g[1], g[0]});
}

/// Velocity generated by a stream function: S_θ f, or the Hamiltonian field on the quotient.
inline VectorFieldComponents stream_velocity(const ContactModel& model, const ScalarField& f) {
  return model.kind() == ContactKind::QuantoTorus2 ? hamiltonian_field(model, f) : contact_vector_field(model, f);
}

/// Σ u_i ∂_i m without truncation.
inline ScalarField directional_derivative(const VectorFieldComponents& u, const ScalarField& m) {
  require_same_grid(u.grid, m.grid(), "advect");
  if (u.size() != m.grid().ndim()) throw std::invalid_argument("advect: velocity has wrong number of components");
  const auto gm = gradient(m);
  ScalarField out(m.grid());
  for (std::size_t a = 0; a < u.size(); ++a) out += u[a] * gm[a];
  return out;
}

/// u(m) = Σ u_i ∂_i m, dealiased.
inline ScalarField advect(const ContactModel& model, const VectorFieldComponents& u, const ScalarField& m) {
  require_model_grid(model, m, "advect");
  return dealias(directional_derivative(u, m));
}

/// {f, g} = S_θ f(g) - g E(f); on QuantoTorus2 the symplectic bracket f_x g_y - f_y g_x.
inline ScalarField contact_poisson(const ContactModel& model, const ScalarField& f, const ScalarField& g) {
  require_model_grid(model, f, "contact_poisson");
  require_model_grid(model, g, "contact_poisson");
  ScalarField b = directional_derivative(stream_velocity(model, f), g);
  if (model.kind() != ContactKind::QuantoTorus2) b -= g * reeb_derivative(model, f);
  return dealias(b);
}

/// m = f - Δf.
inline ScalarField contact_laplacian(const ContactModel& model, const ScalarField& f) {
  require_model_grid(model, f, "contact_laplacian");
  Spectrum s(f);
  s.apply_radial([](double k2) { return 1.0 + k2; });
  return s.to_field();
}

/// f = (1 - Δ)^{-1} m.
inline ScalarField inverse_contact_laplacian(const ContactModel& model, const ScalarField& m) {
  require_model_grid(model, m, "inverse_contact_laplacian");
  return helmholtz_inverse(m);
}

/// div(S_θ f) computed directly from the components, for checking against (n+1) E(f).
inline ScalarField divergence_of_contact_field(const ContactModel& model, const ScalarField& f) {
  const auto u = contact_vector_field(model, f);
  ScalarField div(model.grid());
  for (std::size_t a = 0; a < u.size(); ++a) div += partial_derivative(u[a], a);
  return div;
}

}  // namespace contactea
