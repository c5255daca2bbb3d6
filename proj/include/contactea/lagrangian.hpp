#pragma once

// Lagrangian particles (η, Λ) of the padded contactomorphism flow:
//   ∂η/∂t = S_θ f(t, η),   ∂Λ/∂t = E(f)(t, η),   Jac(η) = e^{(n+1)Λ},
// and the momentum transport check m(t, η) Jac^{(n+2)/(n+1)} = m₀.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "contactea/contact.hpp"
#include "contactea/spectral.hpp"

namespace contactea {

struct FlowMap {
  std::vector<Point> positions;
  std::vector<double> lambdas;
  std::vector<double> m0_samples;
  std::vector<Point> seeds;

  std::size_t size() const noexcept { return positions.size(); }

  void validate() const {
    const std::size_t n = positions.size();
    if (lambdas.size() != n || m0_samples.size() != n || seeds.size() != n) {
      throw std::invalid_argument("FlowMap: particle arrays have different lengths");
    }
  }
};

/// Optional wavenumber box for band-limited interpolation.
using Band = std::optional<std::array<int, 3>>;

/// Band kept by the 2/3 rule on `grid`.
inline std::array<int, 3> dealias_band(const Grid& grid) {
  std::array<int, 3> b{0, 0, 0};
  for (std::size_t a = 0; a < grid.ndim(); ++a) b[a] = dealias_cutoff(grid.size(a));
  return b;
}

/// Seeds particles on a uniform lattice of grid nodes, `per_axis` along each axis,
/// with m₀ read at the nodes and Λ = 0.
inline FlowMap seed_lattice(const ScalarField& m0, std::size_t per_axis) {
  const Grid& g = m0.grid();
  if (per_axis == 0) throw std::invalid_argument("seed_lattice: per_axis must be >= 1");
  for (std::size_t a = 0; a < g.ndim(); ++a) {
    if (per_axis > g.size(a)) throw std::invalid_argument("seed_lattice: more particles per axis than grid nodes");
  }
  FlowMap flow;
  std::array<std::size_t, 3> counts{1, 1, 1};
  for (std::size_t a = 0; a < g.ndim(); ++a) counts[a] = per_axis;
  for (std::size_t i = 0; i < counts[0]; ++i) {
    for (std::size_t j = 0; j < counts[1]; ++j) {
      for (std::size_t k = 0; k < counts[2]; ++k) {
        const std::array<std::size_t, 3> sub{i, j, k};
        std::array<std::size_t, 3> node{0, 0, 0};
        Point p{0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < g.ndim(); ++a) {
          node[a] = sub[a] * g.size(a) / per_axis;
          p[a] = g.coordinate(a, node[a]);
        }
        flow.seeds.push_back(p);
        flow.positions.push_back(p);
        flow.lambdas.push_back(0.0);
        flow.m0_samples.push_back(m0.at(node[0], node[1], node[2]));
      }
    }
  }
  return flow;
}

/// Builds a flow map from arbitrary seed positions, interpolating m₀ spectrally.
inline FlowMap seed_points(const ScalarField& m0, std::vector<Point> seeds) {
  FlowMap flow;
  const Interpolant interp(std::span<const ScalarField>(&m0, 1));
  for (auto& s : seeds) {
    s = m0.grid().wrap(s);
    flow.m0_samples.push_back(interp.evaluate_single(s));
  }
  flow.positions = seeds;
  flow.lambdas.assign(seeds.size(), 0.0);
  flow.seeds = std::move(seeds);
  return flow;
}

struct ParticleRates {
  std::vector<std::array<double, 3>> velocity;
  std::vector<double> reeb;
};

/// Stream-function jet interpolated at the particles, turned into (S_θ f, E(f)).
inline ParticleRates particle_rates(const ContactModel& model, const ScalarField& f, std::span<const Point> positions,
                                    Band band = {}) {
  require_model_grid(model, f, "particle_rates");
  const std::size_t nd = model.grid().ndim();
  std::vector<ScalarField> jet{f};
  const Spectrum base(f);
  for (std::size_t a = 0; a < nd; ++a) {
    Spectrum s = base;
    jet.push_back(s.differentiate(a).to_field());
  }
  const Interpolant interp(jet, band);
  ParticleRates rates;
  rates.velocity.resize(positions.size());
  rates.reeb.resize(positions.size());
  std::array<double, 4> vals{};
  for (std::size_t p = 0; p < positions.size(); ++p) {
    interp.evaluate(positions[p], std::span<double>(vals.data(), nd + 1));
    PointJet j;
    j.f = vals[0];
    for (std::size_t a = 0; a < nd; ++a) j.grad[a] = vals[a + 1];
    const auto v = frame_velocity(model.kind(), positions[p], j);
    rates.velocity[p] = v.u;
    rates.reeb[p] = v.reeb;
  }
  return rates;
}

/// Moves positions and padding by `scale * rates` from `base`.
inline void displace(const FlowMap& base, const ParticleRates& rates, double scale, std::vector<Point>& pos,
                     std::vector<double>& lam) {
  pos.resize(base.size());
  lam.resize(base.size());
  for (std::size_t p = 0; p < base.size(); ++p) {
    for (std::size_t a = 0; a < 3; ++a) pos[p][a] = base.positions[p][a] + scale * rates.velocity[p][a];
    lam[p] = base.lambdas[p] + scale * rates.reeb[p];
  }
}

/// Combines four RK stages into the new flow map; positions are wrapped into the box.
inline FlowMap combine_rk4(const FlowMap& flow, const Grid& grid, std::span<const ParticleRates, 4> k, double dt) {
  FlowMap next = flow;
  for (std::size_t p = 0; p < flow.size(); ++p) {
    Point x = flow.positions[p];
    for (std::size_t a = 0; a < 3; ++a) {
      x[a] += dt / 6.0 *
              (k[0].velocity[p][a] + 2.0 * k[1].velocity[p][a] + 2.0 * k[2].velocity[p][a] + k[3].velocity[p][a]);
    }
    next.positions[p] = grid.wrap(x);
    next.lambdas[p] += dt / 6.0 * (k[0].reeb[p] + 2.0 * k[1].reeb[p] + 2.0 * k[2].reeb[p] + k[3].reeb[p]);
  }
  return next;
}

/// One RK4 step of the particle ODE with the stream function frozen over the step.
inline FlowMap advance_flow(const FlowMap& flow, const ContactModel& model, const ScalarField& f, double dt,
                            Band band = {}) {
  flow.validate();
  std::array<ParticleRates, 4> k;
  std::vector<Point> pos;
  std::vector<double> lam;
  k[0] = particle_rates(model, f, flow.positions, band);
  displace(flow, k[0], 0.5 * dt, pos, lam);
  k[1] = particle_rates(model, f, pos, band);
  displace(flow, k[1], 0.5 * dt, pos, lam);
  k[2] = particle_rates(model, f, pos, band);
  displace(flow, k[2], dt, pos, lam);
  k[3] = particle_rates(model, f, pos, band);
  return combine_rk4(flow, model.grid(), k, dt);
}

/// Jac(η) = e^{(n+1)Λ} per particle.
inline std::vector<double> jacobian_from_lambda(const FlowMap& flow, int n) {
  std::vector<double> jac;
  jac.reserve(flow.size());
  for (double lam : flow.lambdas) jac.push_back(std::exp((n + 1.0) * lam));
  return jac;
}

struct TransportResidual {
  double max_abs = 0.0;
  double rms = 0.0;
  std::vector<double> m_interp;
  std::vector<double> residual;
};

/// r_p = m(t, η(t,p)) Jac^{(n+2)/(n+1)} - m₀(p).
inline TransportResidual transport_residual(const FlowMap& flow, const ContactModel& model, const ScalarField& m,
                                            int n, Band band = {}) {
  flow.validate();
  require_model_grid(model, m, "transport_residual");
  const Interpolant interp(std::span<const ScalarField>(&m, 1), band);
  const double exponent = (n + 2.0) / (n + 1.0);
  TransportResidual out;
  double sq = 0.0;
  for (std::size_t p = 0; p < flow.size(); ++p) {
    const double mi = interp.evaluate_single(flow.positions[p]);
    const double jac = std::exp((n + 1.0) * flow.lambdas[p]);
    const double r = mi * std::pow(jac, exponent) - flow.m0_samples[p];
    out.m_interp.push_back(mi);
    out.residual.push_back(r);
    out.max_abs = std::max(out.max_abs, std::abs(r));
    sq += r * r;
  }
  out.rms = flow.size() ? std::sqrt(sq / static_cast<double>(flow.size())) : 0.0;
  return out;
}

inline void write_particles_csv_header(std::ostream& os, std::size_t ndim) {
  static const char* names[] = {"x", "y", "z"};
  os << "t,particle_id";
  for (std::size_t a = 0; a < ndim; ++a) os << ',' << names[a];
  os << ",lambda,m_interp,residual\n";
}

inline void write_particles_csv_rows(std::ostream& os, double t, const FlowMap& flow, const TransportResidual& res,
                                     std::size_t ndim) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    os << buf;
  };
  for (std::size_t p = 0; p < flow.size(); ++p) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu", t, p);
    os << buf;
    for (std::size_t a = 0; a < ndim; ++a) put(flow.positions[p][a]);
    put(flow.lambdas[p]);
    put(res.m_interp[p]);
    put(res.residual[p]);
    os << '\n';
  }
}

}  // namespace contactea
