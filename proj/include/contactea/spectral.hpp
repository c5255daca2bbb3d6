#pragma once

// Fourier pseudo-spectral machinery on uniform periodic grids: real-to-complex
// transforms (FFTW), exact differentiation, screened-Poisson inversion,
// 2/3-rule dealiasing, trigonometric interpolation and norms.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "contactea/errors.hpp"
#include "contactea/grid.hpp"

namespace contactea {

using Complex = std::complex<double>;

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  explicit FftPlan(const Grid& grid) {
    int n[3];
    const int rank = static_cast<int>(grid.ndim());
    for (int a = 0; a < rank; ++a) n[a] = static_cast<int>(grid.size(static_cast<std::size_t>(a)));
    real_size_ = grid.total();
    spec_size_ = real_size_ / grid.size(grid.ndim() - 1) * (grid.size(grid.ndim() - 1) / 2 + 1);

    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(real_size_);
    spec_ = fftw_alloc_complex(spec_size_);
    // FFTW_ESTIMATE keeps plan selection deterministic, hence bitwise-reproducible output.
    forward_ = fftw_plan_dft_r2c(rank, n, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r(rank, n, spec_, real_, FFTW_ESTIMATE);
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed for grid " + grid.describe());
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  std::size_t spec_size() const noexcept { return spec_size_; }

  void forward(std::span<const double> in, std::span<Complex> out) {
    std::memcpy(real_, in.data(), real_size_ * sizeof(double));
    fftw_execute(forward_);
    std::memcpy(static_cast<void*>(out.data()), spec_, spec_size_ * sizeof(fftw_complex));
  }

  // c2r destroys its input, so the spectrum is staged through the plan's buffer.
  void inverse(std::span<const Complex> in, std::span<double> out) {
    std::memcpy(spec_, static_cast<const void*>(in.data()), spec_size_ * sizeof(fftw_complex));
    fftw_execute(inverse_);
    const double scale = 1.0 / static_cast<double>(real_size_);
    for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
  }

 private:
  std::size_t real_size_ = 0;
  std::size_t spec_size_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

inline FftPlan& plan_for(const Grid& grid) {
  thread_local std::map<std::vector<std::size_t>, std::unique_ptr<FftPlan>> cache;
  auto key = grid.dims();
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(std::move(key), std::make_unique<FftPlan>(grid)).first;
  return *it->second;
}

}  // namespace detail

/// Integer wavenumber of storage index `i` on an axis of `n` points.
/// The Nyquist index n/2 maps to +n/2.
inline int wavenumber(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<int>(i) : static_cast<int>(i) - static_cast<int>(n);
}

/// Largest wavenumber kept by the 2/3 rule on an axis of `n` points.
inline int dealias_cutoff(std::size_t n) { return static_cast<int>(n / 3); }

/// Half-complex spectrum of a real field (FFTW r2c layout, unnormalised).
class Spectrum {
 public:
  explicit Spectrum(const ScalarField& field) : grid_(field.grid()) {
    if (!field.all_finite()) throw NonFiniteValue("spectral transform of a non-finite field");
    auto& plan = detail::plan_for(grid_);
    coeffs_.resize(plan.spec_size());
    plan.forward(field.values(), coeffs_);
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  /// Number of stored indices along `axis` (last axis holds n/2 + 1).
  std::size_t extent(std::size_t axis) const {
    return axis + 1 == grid_.ndim() ? grid_.size(axis) / 2 + 1 : grid_.size(axis);
  }

  ScalarField to_field() const {
    ScalarField out(grid_);
    detail::plan_for(grid_).inverse(coeffs_, out.values());
    return out;
  }

  /// Calls fn(Complex& c, const std::array<int,3>& k) for every stored mode, with
  /// integer wavenumbers k (unused axes 0).
  template <class Fn>
  void for_each_mode(Fn&& fn) {
    const std::size_t nd = grid_.ndim();
    std::array<std::size_t, 3> ext{1, 1, 1};
    for (std::size_t a = 0; a < nd; ++a) ext[a] = extent(a);
    std::size_t flat = 0;
    std::array<int, 3> k{0, 0, 0};
    for (std::size_t i0 = 0; i0 < ext[0]; ++i0) {
      k[0] = nd == 1 ? static_cast<int>(i0) : wavenumber(i0, grid_.size(0));
      for (std::size_t i1 = 0; i1 < ext[1]; ++i1) {
        if (nd >= 2) k[1] = nd == 2 ? static_cast<int>(i1) : wavenumber(i1, grid_.size(1));
        for (std::size_t i2 = 0; i2 < ext[2]; ++i2) {
          if (nd == 3) k[2] = static_cast<int>(i2);
          fn(coeffs_[flat++], k);
        }
      }
    }
  }

  /// Physical wavenumber 2πk/L along `axis`.
  double physical(std::size_t axis, int k) const { return two_pi * k / grid_.length(axis); }

  double wavenumber_squared(const std::array<int, 3>& k) const {
    double s = 0.0;
    for (std::size_t a = 0; a < grid_.ndim(); ++a) {
      const double ka = physical(a, k[a]);
      s += ka * ka;
    }
    return s;
  }

  bool is_nyquist(std::size_t axis, int k) const {
    return std::abs(k) * 2 == static_cast<int>(grid_.size(axis));
  }

  Spectrum& differentiate(std::size_t axis, int order = 1) {
    if (axis >= grid_.ndim()) {
      throw std::invalid_argument("partial_derivative: axis " + std::to_string(axis) + " out of range for " +
                                  std::to_string(grid_.ndim()) + "-D grid");
    }
    if (order < 0) throw std::invalid_argument("partial_derivative: negative order");
    for_each_mode([&](Complex& c, const std::array<int, 3>& k) {
      if (order % 2 == 1 && is_nyquist(axis, k[axis])) {
        c = 0.0;
        return;
      }
      const double ka = physical(axis, k[axis]);
      Complex factor{1.0, 0.0};
      for (int i = 0; i < order; ++i) factor *= Complex(0.0, ka);
      c *= factor;
    });
    return *this;
  }

  /// Multiplies every mode by symbol(|k|²).
  template <class Symbol>
  Spectrum& apply_radial(Symbol&& symbol) {
    for_each_mode([&](Complex& c, const std::array<int, 3>& k) { c *= symbol(wavenumber_squared(k)); });
    return *this;
  }

  Spectrum& truncate_two_thirds() {
    const std::size_t nd = grid_.ndim();
    for_each_mode([&](Complex& c, const std::array<int, 3>& k) {
      for (std::size_t a = 0; a < nd; ++a) {
        if (std::abs(k[a]) > dealias_cutoff(grid_.size(a))) {
          c = 0.0;
          return;
        }
      }
    });
    return *this;
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

/// ∂f/∂x_axis (or a higher derivative), exact for band-limited input.
inline ScalarField partial_derivative(const ScalarField& field, std::size_t axis, int order = 1) {
  Spectrum s(field);
  s.differentiate(axis, order);
  return s.to_field();
}

inline VectorFieldComponents gradient(const ScalarField& field) {
  Spectrum base(field);
  std::vector<ScalarField> comps;
  for (std::size_t a = 0; a < field.grid().ndim(); ++a) {
    Spectrum s = base;
    comps.push_back(s.differentiate(a).to_field());
  }
  return VectorFieldComponents(std::move(comps));
}

inline ScalarField laplacian(const ScalarField& field) {
  Spectrum s(field);
  s.apply_radial([](double k2) { return -k2; });
  return s.to_field();
}

/// (1 - Δ)^{-1}: symbol 1/(1 + |k|²).
inline ScalarField helmholtz_inverse(const ScalarField& field) {
  Spectrum s(field);
  s.apply_radial([](double k2) { return 1.0 / (1.0 + k2); });
  return s.to_field();
}

/// Solves (Δ - α²) f = rhs. For α = 0 the mean of f is set to zero.
inline ScalarField screened_poisson_solve(const ScalarField& rhs, double alpha_squared) {
  if (alpha_squared < 0.0) throw std::invalid_argument("screened_poisson_solve: alpha^2 must be >= 0");
  Spectrum s(rhs);
  s.apply_radial([alpha_squared](double k2) {
    const double d = k2 + alpha_squared;
    return d == 0.0 ? 0.0 : -1.0 / d;
  });
  return s.to_field();
}

/// Zeroes every mode whose wavenumber on any axis exceeds floor(n/3).
inline ScalarField dealias(const ScalarField& field) {
  Spectrum s(field);
  s.truncate_two_thirds();
  return s.to_field();
}

struct Norms {
  double l_inf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
};

inline Norms norms(const ScalarField& field) {
  Norms n;
  n.l_inf = field.max_abs();
  n.l2 = std::sqrt(inner(field, field));
  const ScalarField lap = laplacian(field);
  n.h1 = std::sqrt(std::max(0.0, inner(field, field) - inner(field, lap)));
  return n;
}

/// Trigonometric interpolant of one or more fields sharing a grid. Optionally
/// restricted to |k_a| <= band[a], which is exact for fields band-limited to that
/// box and much cheaper to evaluate. Nyquist modes are evaluated through cos(n x/2),
/// so values at grid nodes are reproduced exactly.
class Interpolant {
 public:
  explicit Interpolant(std::span<const ScalarField> fields, std::optional<std::array<int, 3>> band = {})
      : grid_(fields.empty() ? throw std::invalid_argument("Interpolant: no fields") : fields.front().grid()),
        nfields_(fields.size()) {
    const std::size_t nd = grid_.ndim();
    for (std::size_t a = 0; a < nd; ++a) {
      const std::size_t n = grid_.size(a);
      const bool last = a + 1 == nd;
      const std::size_t ext = last ? n / 2 + 1 : n;
      for (std::size_t i = 0; i < ext; ++i) {
        const int k = last ? static_cast<int>(i) : wavenumber(i, n);
        if (band && std::abs(k) > (*band)[a]) continue;
        axes_[a].push_back({i, k, std::abs(k) * 2 == static_cast<int>(n)});
      }
    }
    for (std::size_t a = nd; a < 3; ++a) axes_[a].push_back({0, 0, false});

    const std::size_t n0 = axes_[0].size(), n1 = axes_[1].size(), n2 = axes_[2].size();
    coeffs_.assign(nfields_ * n0 * n1 * n2, Complex{});
    const double norm = 1.0 / static_cast<double>(grid_.total());
    for (std::size_t f = 0; f < nfields_; ++f) {
      require_same_grid(grid_, fields[f].grid(), "Interpolant");
      const Spectrum spec(fields[f]);
      const auto c = spec.coeffs();
      const std::size_t e1 = nd >= 2 ? spec.extent(1) : 1;
      const std::size_t e2 = nd == 3 ? spec.extent(2) : 1;
      for (std::size_t a0 = 0; a0 < n0; ++a0) {
        for (std::size_t a1 = 0; a1 < n1; ++a1) {
          for (std::size_t a2 = 0; a2 < n2; ++a2) {
            const auto& last = nd == 1 ? axes_[0][a0] : nd == 2 ? axes_[1][a1] : axes_[2][a2];
            // Interior modes of the half-spectrum axis stand for a conjugate pair.
            const double w = (last.k == 0 || last.nyquist) ? 1.0 : 2.0;
            const std::size_t src = (axes_[0][a0].index * e1 + axes_[1][a1].index) * e2 + axes_[2][a2].index;
            coeffs_[((f * n0 + a0) * n1 + a1) * n2 + a2] = w * norm * c[src];
          }
        }
      }
    }
  }

  std::size_t field_count() const noexcept { return nfields_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Evaluates every field at `x`; out.size() must equal field_count().
  void evaluate(const Point& x, std::span<double> out) const {
    if (out.size() != nfields_) throw std::invalid_argument("Interpolant: output size mismatch");
    std::array<std::vector<Complex>, 3> phase;
    for (std::size_t a = 0; a < 3; ++a) {
      phase[a].resize(axes_[a].size());
      for (std::size_t i = 0; i < axes_[a].size(); ++i) {
        const auto& m = axes_[a][i];
        if (a >= grid_.ndim()) {
          phase[a][i] = 1.0;
          continue;
        }
        const double arg = two_pi * m.k * x[a] / grid_.length(a);
        phase[a][i] = m.nyquist ? Complex(std::cos(arg), 0.0) : Complex(std::cos(arg), std::sin(arg));
      }
    }
    const std::size_t n0 = axes_[0].size(), n1 = axes_[1].size(), n2 = axes_[2].size();
    for (std::size_t f = 0; f < nfields_; ++f) {
      Complex acc{};
      const Complex* c = coeffs_.data() + f * n0 * n1 * n2;
      for (std::size_t a0 = 0; a0 < n0; ++a0) {
        for (std::size_t a1 = 0; a1 < n1; ++a1) {
          Complex inner_sum{};
          for (std::size_t a2 = 0; a2 < n2; ++a2) inner_sum += *c++ * phase[2][a2];
          acc += phase[0][a0] * phase[1][a1] * inner_sum;
        }
      }
      out[f] = acc.real();
    }
  }

  double evaluate_single(const Point& x) const {
    double v = 0.0;
    evaluate(x, std::span<double>(&v, 1));
    return v;
  }

 private:
  struct AxisMode {
    std::size_t index;
    int k;
    bool nyquist;
  };

  Grid grid_;
  std::size_t nfields_;
  std::array<std::vector<AxisMode>, 3> axes_;
  std::vector<Complex> coeffs_;
};

/// Spectral interpolation of `field` at `points` (wrapped periodically).
inline std::vector<double> interpolate(const ScalarField& field, std::span<const std::vector<double>> points) {
  const std::size_t nd = field.grid().ndim();
  Interpolant interp(std::span<const ScalarField>(&field, 1));
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != nd) {
      throw std::invalid_argument("interpolate: point of dimension " + std::to_string(p.size()) +
                                  " on a " + std::to_string(nd) + "-D grid");
    }
    Point q{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < nd; ++a) q[a] = p[a];
    out.push_back(interp.evaluate_single(field.grid().wrap(q)));
  }
  return out;
}

}  // namespace contactea
