#ifndef BOHMLAB_IDENTITIES_HPP
#define BOHMLAB_IDENTITIES_HPP

#include <functional>

#include "bohmlab/residual.hpp"
#include "bohmlab/stencil.hpp"

namespace bohmlab {

/// Discrete residual of div(S grad S) = (grad S)^2 + S lap S.
///
/// The left side nests two first-derivative stencils, so the two outermost
/// nodes on each side are excluded from the norms.
inline ResidualReport vector_identity_residual(const RealField1D& S) {
  const RealField1D dS = d1(S);
  const RealField1D flux = pointwise([](double s, double g) { return s * g; }, S, dS);
  const RealField1D lhs = d1(flux);
  const RealField1D lap = d2(S);
  RealField1D r = pointwise([](double l, double g, double s, double q) { return l - g * g - s * q; }, lhs, dS, S, lap);
  ResidualReport report;
  report.entries.push_back(make_entry("vector_identity", std::move(r), 2));
  return report;
}

/// Same residual for an analytic profile, sampled on `grid` and on its
/// refinement; the entry carries the observed max-norm order.
inline ResidualReport vector_identity_residual(const std::function<double(double)>& S, const Grid1D& grid) {
  ResidualReport coarse = vector_identity_residual(RealField1D::tabulate(grid, S));
  const ResidualReport fine = vector_identity_residual(RealField1D::tabulate(grid.refined(), S));
  coarse.entries[0].order = refinement(coarse.entries[0].norms.max, fine.entries[0].norms.max);
  return coarse;
}

}  // namespace bohmlab

#endif  // BOHMLAB_IDENTITIES_HPP
