#ifndef BOHMLAB_RESIDUAL_HPP
#define BOHMLAB_RESIDUAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bohmlab/grid.hpp"

namespace bohmlab {

/// Residual norms below this are treated as exact (rounding noise only) when
/// estimating convergence orders.
inline constexpr double roundoff_floor = 1e-10;

struct Norms {
  double max = 0.0;
  /// sqrt(sum r^2 dx)
  double l2 = 0.0;
  std::size_t count = 0;
};

/// Norms over nodes [band, n - band) that are not masked.
inline Norms interior_norms(const RealField1D& r, std::size_t band = 1, const std::vector<bool>* mask = nullptr) {
  Norms out;
  const std::size_t n = r.size();
  double sum = 0.0;
  for (std::size_t j = band; j + band < n; ++j) {
    if (mask && (*mask)[j]) continue;
    out.max = std::max(out.max, std::abs(r[j]));
    sum += r[j] * r[j];
    ++out.count;
  }
  out.l2 = std::sqrt(sum * r.grid().dx());
  return out;
}

/// Observed order from errors on a grid and on its refinement by `ratio`.
inline double observed_order(double coarse, double fine, double ratio = 2.0) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(coarse / fine) / std::log(ratio);
}

struct Refinement {
  double coarse = 0.0;
  double fine = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
  /// both levels at or below roundoff_floor: the discretization reproduces the
  /// quantity exactly and no order can be measured
  bool exact = false;

  bool converges_at(double min_order) const { return exact || (std::isfinite(order) && order >= min_order); }
};

inline Refinement refinement(double coarse, double fine, double ratio = 2.0, double floor = roundoff_floor) {
  Refinement r;
  r.coarse = coarse;
  r.fine = fine;
  r.exact = coarse <= floor && fine <= floor;
  if (!r.exact) r.order = observed_order(coarse, fine, ratio);
  return r;
}

/// One equation's residual: norms, an optional refinement estimate and an
/// optional pass/fail verdict against a max-norm tolerance.
struct ResidualEntry {
  std::string equation;
  std::optional<RealField1D> field;
  Norms norms;
  std::optional<Refinement> order;
  std::optional<double> tolerance;

  std::optional<bool> pass() const {
    if (!tolerance) return std::nullopt;
    return norms.max <= *tolerance;
  }
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double masked_fraction = 0.0;
  /// set when more than 20% of nodes are masked
  bool untrusted = false;

  const ResidualEntry& at(const std::string& equation) const {
    for (const auto& e : entries)
      if (e.equation == equation) return e;
    throw Error(ErrorKind::configuration, "no residual named " + equation);
  }
  ResidualEntry& at(const std::string& equation) {
    return const_cast<ResidualEntry&>(static_cast<const ResidualReport&>(*this).at(equation));
  }

  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.pass().value_or(true); });
  }
};

inline constexpr double untrusted_mask_fraction = 0.2;

inline ResidualEntry make_entry(std::string equation, RealField1D field, std::size_t band = 1,
                                const std::vector<bool>* mask = nullptr) {
  ResidualEntry e;
  e.equation = std::move(equation);
  e.norms = interior_norms(field, band, mask);
  e.field = std::move(field);
  return e;
}

}  // namespace bohmlab

#endif  // BOHMLAB_RESIDUAL_HPP
