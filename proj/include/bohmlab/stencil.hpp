#ifndef BOHMLAB_STENCIL_HPP
#define BOHMLAB_STENCIL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "bohmlab/grid.hpp"

namespace bohmlab {

// Finite-difference operators on a Grid1D. Interior nodes use centered
// 3-point stencils; the two boundary nodes use one-sided second-order
// stencils, so every output node is O(dx^2) accurate and both operators are
// exact on polynomials of degree <= 2.

template <class T>
Field1D<T> d1(const Field1D<T>& f) {
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorKind::invalid_grid, "d1 needs at least 3 nodes");
  const double inv2h = 1.0 / (2.0 * f.grid().dx());
  std::vector<T> out(n);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (f[j + 1] - f[j - 1]) * inv2h;
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
  return Field1D<T>(f.grid(), std::move(out));
}

template <class T>
Field1D<T> d2(const Field1D<T>& f) {
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorKind::invalid_grid, "d2 needs at least 3 nodes");
  const double h = f.grid().dx();
  const double invh2 = 1.0 / (h * h);
  std::vector<T> out(n);
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * invh2;
  if (n >= 4) {
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invh2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invh2;
  } else {
    // only first order with three nodes
    out[0] = out[1];
    out[n - 1] = out[1];
  }
  return Field1D<T>(f.grid(), std::move(out));
}

/// d2 with every stencil weight replaced by its magnitude, applied to |f|.
/// Bounds the size of the terms that cancel inside d2, i.e. the scale of its
/// rounding error.
inline RealField1D d2_magnitude(const RealField1D& f) {
  const std::size_t n = f.size();
  const double h = f.grid().dx();
  const double invh2 = 1.0 / (h * h);
  auto a = [&](std::size_t j) { return std::abs(f[j]); };
  std::vector<double> out(n);
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (a(j + 1) + 2.0 * a(j) + a(j - 1)) * invh2;
  if (n >= 4) {
    out[0] = (2.0 * a(0) + 5.0 * a(1) + 4.0 * a(2) + a(3)) * invh2;
    out[n - 1] = (2.0 * a(n - 1) + 5.0 * a(n - 2) + 4.0 * a(n - 3) + a(n - 4)) * invh2;
  } else {
    out[0] = out[n - 1] = out[1];
  }
  return RealField1D(f.grid(), std::move(out));
}

/// Periodic centered second derivative (node n wraps to node 0).
template <class T>
std::vector<T> d2_periodic(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  const double invh2 = 1.0 / (h * h);
  std::vector<T> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const T& left = f[(j + n - 1) % n];
    const T& right = f[(j + 1) % n];
    out[j] = (right - 2.0 * f[j] + left) * invh2;
  }
  return out;
}

/// Pointwise combination of fields sharing one grid.
template <class F, class T, class... Rest>
auto pointwise(F&& fn, const Field1D<T>& first, const Rest&... rest) {
  using R = decltype(fn(first[0], rest[0]...));
  if (((rest.grid() != first.grid()) || ...))
    throw Error(ErrorKind::invalid_grid, "pointwise operands live on different grids");
  std::vector<R> out(first.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fn(first[j], rest[j]...);
  return Field1D<R>(first.grid(), std::move(out));
}

}  // namespace bohmlab

#endif  // BOHMLAB_STENCIL_HPP
