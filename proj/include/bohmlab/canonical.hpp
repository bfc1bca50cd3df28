#ifndef BOHMLAB_CANONICAL_HPP
#define BOHMLAB_CANONICAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bohmlab/grid.hpp"
#include "bohmlab/residual.hpp"
#include "bohmlab/stencil.hpp"

namespace bohmlab::canonical {

// Amplitude and action treated as generalized coordinates. The scaled
// coordinates are R~ = lambda R (a length) and S~ = S / p_lambda, with
// lambda p_lambda = h so that the flow keeps S - h R fixed.

struct CanonicalState {
  double R_tilde = 0.0;
  double S_tilde = 0.0;
  double p_R = 0.0;
  double p_S = 0.0;
  double t = 0.0;

  double R(const Constants& k) const { return R_tilde / *k.lambda; }
  double S(const Constants& k) const { return S_tilde * *k.p_lambda; }
};

struct CanonicalTrajectory {
  std::vector<CanonicalState> states;
  double dt = 0.0;
};

/// How the external potential depends on the coordinates.
enum class PotentialDependence { zero, of_R, of_S };

inline void require_scale(const Constants& k) {
  k.validate();
  if (!k.lambda || !k.p_lambda)
    throw Error(ErrorKind::invalid_constant, "canonical runs need lambda and p_lambda with lambda * p_lambda = h");
}

struct FlowRates {
  double R_tilde_dot;
  double S_tilde_dot;
  double p_S_dot;
};

/// dR~/dt = dH_R/dp_R = p_S/m, dS~/dt = dH_S/dp_S = p_S/m and
/// dp_S/dt = -p_lambda dV/dS, which vanishes when V does not depend on S.
inline FlowRates reduced_rates(const CanonicalState& s, const Constants& k, PotentialDependence dep) {
  if (dep == PotentialDependence::of_S)
    throw Error(ErrorKind::unsupported_system, "reduced flow is closed only when V is independent of S");
  return FlowRates{s.p_S / k.m, s.p_S / k.m, 0.0};
}

/// Symplectic Euler on the closed subsystem (R~, S~, p_S). p_R is carried
/// along unchanged; its rate depends on spatial profiles (see p_r_rate_diagnostic).
inline CanonicalTrajectory integrate_reduced(const CanonicalState& state0, const Constants& k, PotentialDependence dep,
                                             double dt, std::size_t n) {
  require_scale(k);
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_constant, "dt must be > 0");
  CanonicalTrajectory traj;
  traj.dt = dt;
  traj.states.reserve(n + 1);
  traj.states.push_back(state0);
  CanonicalState s = state0;
  for (std::size_t i = 1; i <= n; ++i) {
    // momentum first, then coordinates with the updated momentum
    s.p_S += dt * reduced_rates(s, k, dep).p_S_dot;
    const FlowRates r = reduced_rates(s, k, dep);
    s.R_tilde += dt * r.R_tilde_dot;
    s.S_tilde += dt * r.S_tilde_dot;
    s.t = state0.t + static_cast<double>(i) * dt;
    traj.states.push_back(s);
  }
  return traj;
}

/// Least-squares slope of S against R along a trajectory.
inline double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

inline double slope_dS_dR(const CanonicalTrajectory& traj, const Constants& k) {
  std::vector<double> R, S;
  for (const auto& s : traj.states) {
    R.push_back(s.R(k));
    S.push_back(s.S(k));
  }
  return fitted_slope(R, S);
}

/// H_S = p_S^2/2m + V - (hbar lambda / 2 m R~) div p_R
inline double hamiltonian_s(double p_S, double V, double div_p_R, double R_tilde, const Constants& k) {
  return p_S * p_S / (2.0 * k.m) + V - k.hbar * *k.lambda / (2.0 * k.m * R_tilde) * div_p_R;
}

/// H_R = (hbar R~ / 2 m lambda S~) div(S~ p_S) - hbar R~ p_S^2 / (2 m lambda p_lambda S~) + p_R p_S / m
inline double hamiltonian_r(const CanonicalState& s, double div_S_p_S, const Constants& k) {
  const double lam = *k.lambda;
  return k.hbar * s.R_tilde / (2.0 * k.m * lam * s.S_tilde) * div_S_p_S -
         k.hbar * s.R_tilde * s.p_S * s.p_S / (2.0 * k.m * lam * *k.p_lambda * s.S_tilde) + s.p_R * s.p_S / k.m;
}

/// With R constant the phase is single-valued only for S in hbar * Z; reports
/// the nearest winding number and the distance to it.
struct WindingReport {
  long long n = 0;
  double remainder = 0.0;
};

inline WindingReport winding_report(double S, const Constants& k) {
  const double w = S / k.hbar;
  const double n = std::round(w);
  return WindingReport{static_cast<long long>(n), k.hbar * (w - n)};
}

/// dp_R/dt = hbar p_S^2 / (2 m S lambda) - hbar / (2 m S lambda) d/dx(S p_S),
/// p_S = dS/dx, evaluated on spatial profiles. Nodes where S vanishes (or R
/// is zero) are masked.
inline MaskedField p_r_rate_diagnostic(const RealField1D& R, const RealField1D& S, const Constants& k) {
  require_scale(k);
  const RealField1D p = d1(S);
  const RealField1D div = d1(pointwise([](double s, double q) { return s * q; }, S, p));
  double peak = 0.0;
  for (double v : S.values()) peak = std::max(peak, std::abs(v));
  std::vector<bool> mask(S.size());
  std::vector<double> out(S.size(), 0.0);
  for (std::size_t j = 0; j < S.size(); ++j) {
    mask[j] = std::abs(S[j]) <= 1e-12 * peak || R[j] == 0.0;
    if (mask[j]) continue;
    const double pre = k.hbar / (2.0 * k.m * S[j] * *k.lambda);
    out[j] = pre * (p[j] * p[j] - div[j]);
  }
  return MaskedField{RealField1D(S.grid(), std::move(out)), std::move(mask)};
}

/// Residuals of the split used when V depends on S:
///   R_xx + (2 m E_S / hbar^2) R = 0
///   E_S - p_S^2 / 2m - V_T = 0,  V_T = -(V(S) + S S_xx / m)
template <class PotentialOfS>
ResidualReport spin_split_residuals(const RealField1D& R, const RealField1D& S, PotentialOfS&& V, double E_S,
                                    const Constants& k) {
  const double kappa = 2.0 * k.m * E_S / (k.hbar * k.hbar);
  RealField1D helm = pointwise([&](double rxx, double r) { return rxx + kappa * r; }, d2(R), R);
  RealField1D energy = pointwise(
      [&](double s, double p, double sxx) {
        const double VT = -(V(s) + s * sxx / k.m);
        return E_S - p * p / (2.0 * k.m) - VT;
      },
      S, d1(S), d2(S));
  ResidualReport report;
  report.entries.push_back(make_entry("helmholtz_R", std::move(helm)));
  report.entries.push_back(make_entry("spin_energy", std::move(energy)));
  return report;
}

}  // namespace bohmlab::canonical

#endif  // BOHMLAB_CANONICAL_HPP
