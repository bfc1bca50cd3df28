#ifndef BOHMLAB_GRID_HPP
#define BOHMLAB_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bohmlab/error.hpp"

namespace bohmlab {

using complex = std::complex<double>;

/// Uniform 1D grid. Node j sits at x_min + j*dx with dx = (x_max - x_min)/(n - 1).
///
/// Periodic solvers identify node n with node 0, so the period is n*dx; use
/// Grid1D::periodic to build a grid from its period.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 3) throw Error(ErrorKind::invalid_grid, "grid needs at least 3 nodes, got " + std::to_string(n));
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
      throw Error(ErrorKind::invalid_grid, "grid extent must be finite with x_max > x_min");
  }

  static Grid1D periodic(double x_min, double period, std::size_t n) {
    if (n < 3) throw Error(ErrorKind::invalid_grid, "grid needs at least 3 nodes, got " + std::to_string(n));
    return Grid1D(x_min, x_min + period * static_cast<double>(n - 1) / static_cast<double>(n), n);
  }

  /// Same extent, spacing halved (2n - 1 nodes).
  Grid1D refined() const { return Grid1D(x_min_, x_max_, 2 * n_ - 1); }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
  double period() const noexcept { return dx() * static_cast<double>(n_); }
  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx(); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

namespace detail {
inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
}  // namespace detail

/// Per-node values on a Grid1D. Construction rejects size mismatches and
/// non-finite entries.
template <class T>
class Field1D {
 public:
  using value_type = T;

  explicit Field1D(Grid1D grid) : grid_(grid), values_(grid.size(), T{}) {}

  Field1D(Grid1D grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw Error(ErrorKind::invalid_grid, "field has " + std::to_string(values_.size()) +
                                               " values for a grid of " + std::to_string(grid_.size()));
    for (std::size_t j = 0; j < values_.size(); ++j)
      if (!detail::finite_value(values_[j]))
        throw Error(ErrorKind::non_finite, "field value at node " + std::to_string(j) + " is not finite");
  }

  template <class F>
  static Field1D tabulate(const Grid1D& grid, F&& f) {
    std::vector<T> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return Field1D(grid, std::move(v));
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<T>& values() const noexcept { return values_; }
  const T& operator[](std::size_t j) const { return values_[j]; }
  T& operator[](std::size_t j) { return values_[j]; }

 private:
  Grid1D grid_;
  std::vector<T> values_;
};

using RealField1D = Field1D<double>;
using ComplexField1D = Field1D<complex>;

/// Field values with a per-node trust mask; masked entries hold 0 and must not be read.
struct MaskedField {
  RealField1D values;
  std::vector<bool> mask;

  bool masked(std::size_t j) const { return mask[j]; }
};

/// Physical constants plus the optional scale constants used by individual scenarios.
struct Constants {
  double hbar = 1.0;
  double m = 1.0;
  double c = 1.0;
  std::optional<double> lambda;
  std::optional<double> p_lambda;
  std::optional<double> C;
  std::optional<double> A;
  std::optional<double> E;

  double planck() const noexcept { return 2.0 * std::numbers::pi * hbar; }

  /// Massless wave equations pass allow_massless to accept m = 0.
  void validate(bool allow_massless = false) const {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0))
        throw Error(ErrorKind::invalid_constant, std::string(name) + " must be finite and > 0");
    };
    positive(hbar, "hbar");
    if (!(allow_massless && m == 0.0)) positive(m, "m");
    positive(c, "c");
    if (lambda && p_lambda) {
      const double h = planck();
      if (std::abs(*lambda * *p_lambda - h) > 1e-12 * h)
        throw Error(ErrorKind::invalid_constant, "lambda * p_lambda must equal h = 2*pi*hbar");
    }
  }

  /// Fills lambda from p_lambda (or the reverse) so that lambda * p_lambda = h.
  Constants with_canonical_scale(double p_lambda_value) const {
    Constants out = *this;
    out.p_lambda = p_lambda_value;
    out.lambda = planck() / p_lambda_value;
    return out;
  }
};

}  // namespace bohmlab

#endif  // BOHMLAB_GRID_HPP
