#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace contactea {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A position in up to three periodic coordinates (x, y, z). Unused axes are ignored.
using Point = std::array<double, 3>;

/// Uniform periodic grid with 1, 2 or 3 axes. Axis 0 is x, 1 is y, 2 is z.
/// Storage is row-major with the last axis fastest.
class Grid {
 public:
  Grid(std::initializer_list<std::size_t> dims) : Grid(std::vector<std::size_t>(dims)) {}

  explicit Grid(std::vector<std::size_t> dims, std::vector<double> lengths = {}) {
    if (dims.empty() || dims.size() > 3) {
      throw std::invalid_argument("Grid: expected 1, 2 or 3 axes, got " + std::to_string(dims.size()));
    }
    if (!lengths.empty() && lengths.size() != dims.size()) {
      throw std::invalid_argument("Grid: lengths must match the number of axes");
    }
    ndim_ = dims.size();
    for (std::size_t a = 0; a < ndim_; ++a) {
      const std::size_t n = dims[a];
      if (n < 8 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("Grid: axis " + std::to_string(a) + " size " + std::to_string(n) +
                                    " is not a power of two >= 8");
      }
      const double len = lengths.empty() ? two_pi : lengths[a];
      if (!(len > 0.0) || !std::isfinite(len)) {
        throw std::invalid_argument("Grid: axis " + std::to_string(a) + " length must be positive");
      }
      dims_[a] = n;
      lengths_[a] = len;
    }
  }

  static Grid uniform(std::size_t ndim, std::size_t n, double length = two_pi) {
    return Grid(std::vector<std::size_t>(ndim, n), std::vector<double>(ndim, length));
  }

  std::size_t ndim() const noexcept { return ndim_; }
  std::size_t size(std::size_t axis) const { return dims_.at(check(axis)); }
  double length(std::size_t axis) const { return lengths_.at(check(axis)); }
  double spacing(std::size_t axis) const { return length(axis) / static_cast<double>(size(axis)); }

  std::vector<std::size_t> dims() const { return {dims_.begin(), dims_.begin() + ndim_}; }
  std::vector<double> lengths() const { return {lengths_.begin(), lengths_.begin() + ndim_}; }

  std::size_t total() const noexcept {
    std::size_t t = 1;
    for (std::size_t a = 0; a < ndim_; ++a) t *= dims_[a];
    return t;
  }

  double min_spacing() const {
    double h = spacing(0);
    for (std::size_t a = 1; a < ndim_; ++a) h = std::min(h, spacing(a));
    return h;
  }

  double cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < ndim_; ++a) v *= spacing(a);
    return v;
  }

  double volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < ndim_; ++a) v *= lengths_[a];
    return v;
  }

  /// Coordinate of node `index` along `axis`, in [0, L).
  double coordinate(std::size_t axis, std::size_t index) const {
    return static_cast<double>(index) * spacing(axis);
  }

  /// Coordinate shifted to [-L/2, L/2): the sawtooth used wherever an explicit
  /// coordinate factor appears on a periodic box.
  double centered_coordinate(std::size_t axis, std::size_t index) const {
    const double x = coordinate(axis, index);
    return x < 0.5 * length(axis) ? x : x - length(axis);
  }

  /// Multi-index of a flat storage index.
  std::array<std::size_t, 3> unflatten(std::size_t flat) const {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t a = ndim_; a-- > 0;) {
      idx[a] = flat % dims_[a];
      flat /= dims_[a];
    }
    return idx;
  }

  Point node(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Point p{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < ndim_; ++a) p[a] = coordinate(a, idx[a]);
    return p;
  }

  /// Wrap a position into the periodic box [0, L) on every axis.
  Point wrap(Point p) const {
    for (std::size_t a = 0; a < ndim_; ++a) {
      const double len = lengths_[a];
      double w = std::fmod(p[a], len);
      if (w < 0.0) w += len;
      if (w >= len) w = 0.0;
      p[a] = w;
    }
    return p;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.ndim_ != b.ndim_) return false;
    for (std::size_t i = 0; i < a.ndim_; ++i) {
      if (a.dims_[i] != b.dims_[i] || a.lengths_[i] != b.lengths_[i]) return false;
    }
    return true;
  }

  std::string describe() const {
    std::string s;
    for (std::size_t a = 0; a < ndim_; ++a) {
      if (a) s += "x";
      s += std::to_string(dims_[a]);
    }
    return s;
  }

 private:
  std::size_t check(std::size_t axis) const {
    if (axis >= ndim_) {
      throw std::invalid_argument("Grid: axis " + std::to_string(axis) + " out of range for " +
                                  std::to_string(ndim_) + "-D grid");
    }
    return axis;
  }

  std::array<std::size_t, 3> dims_{1, 1, 1};
  std::array<double, 3> lengths_{two_pi, two_pi, two_pi};
  std::size_t ndim_ = 0;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch (" + a.describe() + " vs " +
                                b.describe() + ")");
  }
}

/// Real field sampled on a Grid. A value type: copies are deep.
class ScalarField {
 public:
  explicit ScalarField(Grid grid) : grid_(std::move(grid)), values_(grid_.total(), 0.0) {}

  ScalarField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.total()) {
      throw std::invalid_argument("ScalarField: " + std::to_string(values_.size()) +
                                  " values for a grid of " + std::to_string(grid_.total()) + " nodes");
    }
  }

  static ScalarField constant(const Grid& grid, double c) {
    return ScalarField(grid, std::vector<double>(grid.total(), c));
  }

  /// Samples `fn(const Point&)` at every grid node.
  template <class Fn>
  static ScalarField sample(const Grid& grid, Fn&& fn) {
    std::vector<double> v(grid.total());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return ScalarField(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double at(std::size_t i, std::size_t j = 0, std::size_t k = 0) const { return values_[flat(i, j, k)]; }
  double& at(std::size_t i, std::size_t j = 0, std::size_t k = 0) { return values_[flat(i, j, k)]; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  /// Rectangle-rule integral over the periodic box.
  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
  }

  ScalarField& operator+=(const ScalarField& o) { return zip(o, [](double a, double b) { return a + b; }); }
  ScalarField& operator-=(const ScalarField& o) { return zip(o, [](double a, double b) { return a - b; }); }
  ScalarField& operator*=(const ScalarField& o) { return zip(o, [](double a, double b) { return a * b; }); }
  ScalarField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  ScalarField& operator+=(double s) {
    for (double& v : values_) v += s;
    return *this;
  }

  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o) {
    return zip(o, [s](double a, double b) { return a + s * b; });
  }

  template <class Fn>
  ScalarField map(Fn&& fn) const {
    ScalarField r(*this);
    for (double& v : r.values_) v = fn(v);
    return r;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

 private:
  std::size_t flat(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t nd = grid_.ndim();
    if (nd == 1) return i;
    if (nd == 2) return i * grid_.size(1) + j;
    return (i * grid_.size(1) + j) * grid_.size(2) + k;
  }

  template <class Op>
  ScalarField& zip(const ScalarField& o, Op op) {
    require_same_grid(grid_, o.grid_, "ScalarField");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = op(values_[i], o.values_[i]);
    return *this;
  }

  Grid grid_;
  std::vector<double> values_;
};

/// Max-norm of a - b.
inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Grid inner product ∫ a b.
inline double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

/// One component per spatial axis, all on one grid.
struct VectorFieldComponents {
  Grid grid;
  std::vector<ScalarField> components;

  explicit VectorFieldComponents(std::vector<ScalarField> comps)
      : grid(comps.empty() ? throw std::invalid_argument("VectorFieldComponents: no components")
                           : comps.front().grid()),
        components(std::move(comps)) {
    for (const auto& c : components) require_same_grid(grid, c.grid(), "VectorFieldComponents");
  }

  std::size_t size() const noexcept { return components.size(); }
  const ScalarField& operator[](std::size_t i) const { return components.at(i); }

  /// Pointwise max of the Euclidean magnitude.
  double max_magnitude() const {
    double m = 0.0;
    const std::size_t n = grid.total();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& c : components) s += c[i] * c[i];
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }
};

}  // namespace contactea
