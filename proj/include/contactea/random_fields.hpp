#pragma once

// Random trigonometric polynomials for property tests and random initial data.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "contactea/grid.hpp"

namespace contactea {

/// Re Σ c_k e^{i k·x} over the box |k_a| ≤ max_mode (per axis, in units of 2π/L_a),
/// with c_k uniform in the unit square scaled by amplitude / sqrt(#modes).
/// The k = 0 term is dropped when `zero_mean` is set.
inline ScalarField random_trig_polynomial(const Grid& grid, int max_mode, std::mt19937_64& rng, double amplitude = 1.0,
                                          bool zero_mean = false) {
  if (max_mode < 0) throw std::invalid_argument("random_trig_polynomial: max_mode must be >= 0");
  const std::size_t nd = grid.ndim();
  for (std::size_t a = 0; a < nd; ++a) {
    if (2 * max_mode >= static_cast<int>(grid.size(a))) {
      throw std::invalid_argument("random_trig_polynomial: max_mode not resolved by the grid");
    }
  }
  using C = std::complex<double>;
  const int width = 2 * max_mode + 1;
  // Per-axis phase tables e^{i k x_j}.
  std::vector<std::vector<C>> table(nd);
  for (std::size_t a = 0; a < nd; ++a) {
    const std::size_t n = grid.size(a);
    table[a].resize(static_cast<std::size_t>(width) * n);
    for (int k = -max_mode; k <= max_mode; ++k) {
      const double kk = two_pi * k / grid.length(a);
      for (std::size_t j = 0; j < n; ++j) {
        table[a][static_cast<std::size_t>(k + max_mode) * n + j] = std::polar(1.0, kk * grid.coordinate(a, j));
      }
    }
  }
  std::size_t count = 1;
  for (std::size_t a = 0; a < nd; ++a) count *= static_cast<std::size_t>(width);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<C> coeff(count);
  std::vector<std::array<int, 3>> modes(count);
  std::size_t used = 0;
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rem = c;
    std::array<int, 3> k{0, 0, 0};
    for (std::size_t a = nd; a-- > 0;) {
      k[a] = static_cast<int>(rem % static_cast<std::size_t>(width)) - max_mode;
      rem /= static_cast<std::size_t>(width);
    }
    modes[c] = k;
    const double re = unit(rng), im = unit(rng);
    const bool is_zero = k[0] == 0 && k[1] == 0 && k[2] == 0;
    coeff[c] = (zero_mean && is_zero) ? C(0.0) : C(re, im);
    if (!(zero_mean && is_zero)) ++used;
  }
  const double scale = used ? amplitude / std::sqrt(static_cast<double>(used)) : 0.0;

  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = grid.unflatten(i);
    C sum = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      C term = coeff[c];
      for (std::size_t a = 0; a < nd; ++a) {
        term *= table[a][static_cast<std::size_t>(modes[c][a] + max_mode) * grid.size(a) + idx[a]];
      }
      sum += term;
    }
    out[i] = scale * sum.real();
  }
  return out;
}

inline ScalarField random_trig_polynomial(const Grid& grid, int max_mode, std::uint64_t seed, double amplitude = 1.0,
                                          bool zero_mean = false) {
  std::mt19937_64 rng(seed);
  return random_trig_polynomial(grid, max_mode, rng, amplitude, zero_mean);
}

}  // namespace contactea
