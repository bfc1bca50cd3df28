#ifndef BOHMLAB_RELATIVISTIC_HPP
#define BOHMLAB_RELATIVISTIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bohmlab/field_io.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/polar.hpp"
#include "bohmlab/residual.hpp"
#include "bohmlab/stencil.hpp"
#include "bohmlab/time_slice.hpp"

namespace bohmlab::relativistic {

// Klein-Gordon    (1/c^2) phi_tt - phi_xx + (mc/hbar)^2 phi = 0
// Telegraph       (1/c^2) psi_tt - psi_xx + (2m/hbar) psi_t + (mc/hbar)^2 psi = 0
// Both solvers are three-level schemes on a periodic grid.

enum class WaveEquation { kg, telegraph };

inline std::string to_string(WaveEquation e) { return e == WaveEquation::kg ? "kg" : "telegraph"; }

struct SecondOrderHistory {
  std::vector<ComplexField1D> snapshots;
  double dt = 0.0;
  double t0 = 0.0;
  /// discrete energy between consecutive levels (Klein-Gordon only)
  std::vector<double> energy;

  std::size_t size() const noexcept { return snapshots.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  const Grid1D& grid() const { return snapshots.front().grid(); }
};

inline SecondOrderHistory sample_history(const std::function<complex(double, double)>& psi, const Grid1D& grid,
                                         double t0, double dt, std::size_t count) {
  SecondOrderHistory h;
  h.dt = dt;
  h.t0 = t0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    h.snapshots.push_back(ComplexField1D::tabulate(grid, [&](double x) { return psi(x, t); }));
  }
  return h;
}

namespace detail {

inline double mass_wavenumber(const Constants& k) { return k.m * k.c / k.hbar; }

/// dt <= dx/c, tightened by the mass term so the highest mode stays bounded:
/// c^2 dt^2 (4/dx^2 + (mc/hbar)^2) <= 4.
inline void require_stable(const Grid1D& g, const Constants& k, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::configuration, "dt must be > 0");
  const double dx = g.dx();
  const double kappa = mass_wavenumber(k);
  const double lhs = k.c * k.c * dt * dt * (4.0 / (dx * dx) + kappa * kappa);
  if (k.c * dt > dx * (1.0 + 1e-12) || lhs > 4.0 * (1.0 + 1e-12))
    throw Error(ErrorKind::configuration, "time step violates the CFL bound c dt <= dx (with mass correction)");
}

inline std::vector<complex> laplacian(const std::vector<complex>& f, double dx) { return d2_periodic(f, dx); }

/// sum |phi1 - phi0|^2 / (c dt)^2 + Re(conj(phi1) (-L + kappa^2) phi0), times dx
inline double kg_energy(const std::vector<complex>& phi0, const std::vector<complex>& phi1, double dx, double dt,
                        const Constants& k) {
  const std::vector<complex> lap = laplacian(phi0, dx);
  const double kappa2 = mass_wavenumber(k) * mass_wavenumber(k);
  const double cdt2 = k.c * k.c * dt * dt;
  double e = 0.0;
  for (std::size_t j = 0; j < phi0.size(); ++j) {
    e += std::norm(phi1[j] - phi0[j]) / cdt2;
    e += (std::conj(phi1[j]) * (kappa2 * phi0[j] - lap[j])).real();
  }
  return e * dx;
}

}  // namespace detail

/// Leapfrog for the Klein-Gordon equation. The first step uses a second-order
/// Taylor start from (phi0, phi_dot0). Records the conserved discrete energy.
inline SecondOrderHistory solve_kg(const ComplexField1D& phi0, const ComplexField1D& phi_dot0, const Constants& k,
                                   double dt, std::size_t n_steps, std::size_t keep_every = 1) {
  k.validate(true);
  const Grid1D& g = phi0.grid();
  detail::require_stable(g, k, dt);
  if (keep_every == 0) throw Error(ErrorKind::configuration, "keep_every must be >= 1");
  const double dx = g.dx();
  const double c2dt2 = k.c * k.c * dt * dt;
  const double kappa2 = detail::mass_wavenumber(k) * detail::mass_wavenumber(k);
  const std::size_t n = g.size();

  std::vector<complex> prev = phi0.values(), cur(n);
  {
    const auto lap = detail::laplacian(prev, dx);
    for (std::size_t j = 0; j < n; ++j)
      cur[j] = prev[j] + dt * phi_dot0[j] + 0.5 * c2dt2 * (lap[j] - kappa2 * prev[j]);
  }

  SecondOrderHistory h;
  h.dt = dt * static_cast<double>(keep_every);
  h.snapshots.push_back(phi0);
  h.energy.push_back(detail::kg_energy(prev, cur, dx, dt, k));
  if (keep_every == 1 && n_steps >= 1) h.snapshots.emplace_back(g, cur);
  std::vector<complex> next(n);
  for (std::size_t step = 2; step <= n_steps; ++step) {
    const auto lap = detail::laplacian(cur, dx);
    for (std::size_t j = 0; j < n; ++j) next[j] = 2.0 * cur[j] - prev[j] + c2dt2 * (lap[j] - kappa2 * cur[j]);
    std::swap(prev, cur);
    std::swap(cur, next);
    h.energy.push_back(detail::kg_energy(prev, cur, dx, dt, k));
    if (step % keep_every == 0) h.snapshots.emplace_back(g, cur);
  }
  return h;
}

/// Three-level scheme for the telegraph equation with the damping term
/// centered in time: (2m/hbar)(psi^{n+1} - psi^{n-1}) / (2 dt).
inline SecondOrderHistory solve_telegraph(const ComplexField1D& psi0, const ComplexField1D& psi_dot0,
                                          const Constants& k, double dt, std::size_t n_steps,
                                          std::size_t keep_every = 1) {
  k.validate(true);
  const Grid1D& g = psi0.grid();
  detail::require_stable(g, k, dt);
  if (keep_every == 0) throw Error(ErrorKind::configuration, "keep_every must be >= 1");
  const double dx = g.dx();
  const double c2 = k.c * k.c;
  const double kappa2 = detail::mass_wavenumber(k) * detail::mass_wavenumber(k);
  const double gamma = 2.0 * k.m / k.hbar;
  const std::size_t n = g.size();

  std::vector<complex> prev = psi0.values(), cur(n);
  {
    const auto lap = detail::laplacian(prev, dx);
    for (std::size_t j = 0; j < n; ++j) {
      const complex acc = c2 * (lap[j] - gamma * psi_dot0[j] - kappa2 * prev[j]);
      cur[j] = prev[j] + dt * psi_dot0[j] + 0.5 * dt * dt * acc;
    }
  }

  const double a = 1.0 / (c2 * dt * dt);
  const double b = gamma / (2.0 * dt);
  SecondOrderHistory h;
  h.dt = dt * static_cast<double>(keep_every);
  h.snapshots.push_back(psi0);
  if (keep_every == 1 && n_steps >= 1) h.snapshots.emplace_back(g, cur);
  std::vector<complex> next(n);
  for (std::size_t step = 2; step <= n_steps; ++step) {
    const auto lap = detail::laplacian(cur, dx);
    for (std::size_t j = 0; j < n; ++j)
      next[j] = (a * (2.0 * cur[j] - prev[j]) + b * prev[j] + lap[j] - kappa2 * cur[j]) / (a + b);
    std::swap(prev, cur);
    std::swap(cur, next);
    if (step % keep_every == 0) h.snapshots.emplace_back(g, cur);
  }
  return h;
}

/// Polar residuals of either equation at snapshot t_index:
///   amplitude  R_tt/c^2 - R_xx + g R_t + (m^2c^2/hbar^2 + S_x^2/hbar^2 - S_t^2/(c^2 hbar^2)) R
///   phase      S_tt/c^2 - S_xx + g S_t + 2 (R_t S_t / (c^2 R) - R_x S_x / R)
/// with g = 2m/hbar for the telegraph equation and 0 for Klein-Gordon. Also
/// reports the light-cone gap |S_t| - c|S_x| and the phase wave operator S_tt/c^2 - S_xx.
inline ResidualReport polar_residuals(const SecondOrderHistory& hist, const Constants& k, std::size_t t_index,
                                      WaveEquation eq) {
  if (t_index == 0 || t_index + 1 >= hist.size())
    throw Error(ErrorKind::configuration, "polar residuals need snapshots on both sides of t_index");
  const PolarSlice s = polar_slice(hist.snapshots[t_index - 1], hist.snapshots[t_index],
                                   hist.snapshots[t_index + 1], hist.dt, k.hbar);
  const double c2 = k.c * k.c, hb2 = k.hbar * k.hbar;
  const double kappa2 = detail::mass_wavenumber(k) * detail::mass_wavenumber(k);
  const double g = eq == WaveEquation::telegraph ? 2.0 * k.m / k.hbar : 0.0;
  const std::size_t n = s.pair.R.size();

  std::vector<double> amp(n, 0.0), phase(n, 0.0), cone(n, 0.0), wave(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (s.mask[j]) continue;
    const double R = s.pair.R[j];
    const double St = s.S_t[j], Sx = s.S_x[j];
    amp[j] = s.R_tt[j] / c2 - s.R_xx[j] + g * s.R_t[j] + (kappa2 + Sx * Sx / hb2 - St * St / (c2 * hb2)) * R;
    phase[j] = s.S_tt[j] / c2 - s.S_xx[j] + g * St + 2.0 * (s.R_t[j] * St / (c2 * R) - s.R_x[j] * Sx / R);
    cone[j] = std::abs(St) - k.c * std::abs(Sx);
    wave[j] = s.S_tt[j] / c2 - s.S_xx[j];
  }
  const Grid1D& grid = s.pair.R.grid();
  ResidualReport report;
  report.entries.push_back(make_entry("amplitude", RealField1D(grid, std::move(amp)), 1, &s.mask));
  report.entries.push_back(make_entry("phase", RealField1D(grid, std::move(phase)), 1, &s.mask));
  report.entries.push_back(make_entry("light_cone", RealField1D(grid, std::move(cone)), 1, &s.mask));
  report.entries.push_back(make_entry("phase_wave", RealField1D(grid, std::move(wave)), 1, &s.mask));
  report.masked_fraction =
      static_cast<double>(std::count(s.mask.begin(), s.mask.end(), true)) / static_cast<double>(n);
  report.untrusted = report.masked_fraction > untrusted_mask_fraction;
  return report;
}

inline ResidualReport kg_polar_residuals(const SecondOrderHistory& hist, const Constants& k, std::size_t t_index) {
  return polar_residuals(hist, k, t_index, WaveEquation::kg);
}

inline ResidualReport telegraph_polar_residuals(const SecondOrderHistory& hist, const Constants& k,
                                                std::size_t t_index) {
  return polar_residuals(hist, k, t_index, WaveEquation::telegraph);
}

/// Effective subfield masses squared. The Klein-Gordon and telegraph forms
/// coincide:
///   M_R^2 = m^2 + S_x^2/c^2 - S_t^2/c^4
///   M_S^2 = (2 hbar^2/c^2) (R_t S_t / (c^2 R S) - R_x S_x / (R S))
/// Negative values are reported as they are. M_S^2 is masked where R or S vanishes.
struct MassReport {
  RealField1D M_R2;
  RealField1D M_S2;
  std::vector<bool> mask;
};

inline MassReport effective_masses(const RealField1D& R, const RealField1D& S, const RealField1D& R_t,
                                   const RealField1D& S_t, const Constants& k, WaveEquation /*which*/ = WaveEquation::kg) {
  const RealField1D R_x = d1(R), S_x = d1(S);
  const double c2 = k.c * k.c, c4 = c2 * c2;
  double peak_R = 0.0, peak_S = 0.0;
  for (std::size_t j = 0; j < R.size(); ++j) {
    peak_R = std::max(peak_R, std::abs(R[j]));
    peak_S = std::max(peak_S, std::abs(S[j]));
  }
  std::vector<double> mr(R.size()), ms(R.size(), 0.0);
  std::vector<bool> mask(R.size());
  for (std::size_t j = 0; j < R.size(); ++j) {
    mr[j] = k.m * k.m + S_x[j] * S_x[j] / c2 - S_t[j] * S_t[j] / c4;
    mask[j] = std::abs(R[j]) <= node_mask_threshold * peak_R || std::abs(S[j]) <= 1e-12 * peak_S || R[j] == 0.0 ||
              S[j] == 0.0;
    if (mask[j]) continue;
    const double RS = R[j] * S[j];
    ms[j] = 2.0 * k.hbar * k.hbar / c2 * (R_t[j] * S_t[j] / (c2 * RS) - R_x[j] * S_x[j] / RS);
  }
  return MassReport{RealField1D(R.grid(), std::move(mr)), RealField1D(R.grid(), std::move(ms)), std::move(mask)};
}

/// Masses from three snapshots around t_index of a history.
inline MassReport effective_masses(const SecondOrderHistory& hist, const Constants& k, std::size_t t_index,
                                   WaveEquation which = WaveEquation::kg) {
  if (t_index == 0 || t_index + 1 >= hist.size())
    throw Error(ErrorKind::configuration, "masses need snapshots on both sides of t_index");
  const PolarSlice s = polar_slice(hist.snapshots[t_index - 1], hist.snapshots[t_index],
                                   hist.snapshots[t_index + 1], hist.dt, k.hbar);
  return effective_masses(s.pair.R, s.pair.S, s.R_t, s.S_t, k, which);
}

/// S_t^2/(m^2 c^4) - S_x^2/(m^2 c^2), equal to 1 where the amplitude obeys the
/// damped wave equation without mass term.
inline RealField1D hyperbola_constraint(const RealField1D& S_t, const RealField1D& S_x, const Constants& k) {
  if (!(k.m > 0.0)) throw Error(ErrorKind::undefined_constraint, "hyperbola constraint is undefined for m = 0");
  const double mc = k.m * k.c, mc2 = mc * k.c;
  return pointwise([&](double st, double sx) { return st * st / (mc2 * mc2) - sx * sx / (mc * mc); }, S_t, S_x);
}

/// Static solution of the telegraph polar equations (R_t = S_t = 0):
///   hbar^2 c^2 R'' = m^2 c^4 R + c^2 A^2 / R^3,  S' = A / R^2.
struct StaticCase {
  RealField1D R;
  /// R'' from the ODE right-hand side
  RealField1D R_xx;
  RealField1D S_x;
  RealField1D S;
  /// "first_integral": R^2 S' - A
  /// "quantum_potential_ode": V_Q from the ODE curvature minus the closed form
  /// "quantum_potential_stencil": V_Q from d2(R) minus the closed form
  ResidualReport checks;
};

/// Integrates from grid.x_min() with RK4, `substeps` steps per grid cell.
inline StaticCase static_special_case(double R0, double R0_prime, double A, const Constants& k, const Grid1D& grid,
                                      std::size_t substeps = 8) {
  k.validate();
  if (!(R0 > 0.0)) throw Error(ErrorKind::invalid_constant, "R0 must be > 0");
  if (!std::isfinite(A) || !std::isfinite(R0_prime)) throw Error(ErrorKind::invalid_constant, "A and R0' must be finite");
  if (substeps == 0) throw Error(ErrorKind::configuration, "substeps must be >= 1");
  const double hb2 = k.hbar * k.hbar;
  const double m2c2 = k.m * k.m * k.c * k.c;
  auto accel = [&](double R) { return (m2c2 * R + A * A / (R * R * R)) / hb2; };

  const std::size_t n = grid.size();
  const double h = grid.dx() / static_cast<double>(substeps);
  std::vector<double> R(n), Rp(n);
  R[0] = R0;
  Rp[0] = R0_prime;
  double r = R0, v = R0_prime;
  auto check_domain = [&](double value, double x) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error(ErrorKind::domain_exit, "R left the positive domain near x = " + std::to_string(x));
  };
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t s = 0; s < substeps; ++s) {
      const double x = grid.x(j - 1) + static_cast<double>(s) * h;
      const double k1r = v, k1v = accel(r);
      const double r2 = r + 0.5 * h * k1r;
      check_domain(r2, x + 0.5 * h);
      const double k2r = v + 0.5 * h * k1v, k2v = accel(r2);
      const double r3 = r + 0.5 * h * k2r;
      check_domain(r3, x + 0.5 * h);
      const double k3r = v + 0.5 * h * k2v, k3v = accel(r3);
      const double r4 = r + h * k3r;
      check_domain(r4, x + h);
      const double k4r = v + h * k3v, k4v = accel(r4);
      r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      check_domain(r, x + h);
    }
    R[j] = r;
    Rp[j] = v;
  }

  std::vector<double> Rxx(n), Sx(n), S(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Rxx[j] = accel(R[j]);
    Sx[j] = A / (R[j] * R[j]);
  }
  for (std::size_t j = 1; j < n; ++j) S[j] = S[j - 1] + 0.5 * grid.dx() * (Sx[j - 1] + Sx[j]);

  StaticCase out{RealField1D(grid, R), RealField1D(grid, Rxx), RealField1D(grid, Sx), RealField1D(grid, S), {}};
  const double mc2 = k.m * k.c * k.c;
  auto closed = [&](double Rv) { return -0.5 * mc2 - A * A / (2.0 * k.m * Rv * Rv * Rv * Rv); };
  const double pre = -hb2 / (2.0 * k.m);

  RealField1D first = pointwise([&](double Rv, double sx) { return Rv * Rv * sx - A; }, out.R, out.S_x);
  RealField1D ode = pointwise([&](double Rv, double rxx) { return pre * rxx / Rv - closed(Rv); }, out.R, out.R_xx);
  RealField1D stencil = pointwise([&](double Rv, double rxx) { return pre * rxx / Rv - closed(Rv); }, out.R, d2(out.R));
  out.checks.entries.push_back(make_entry("first_integral", std::move(first), 0));
  out.checks.entries.push_back(make_entry("quantum_potential_ode", std::move(ode), 0));
  out.checks.entries.push_back(make_entry("quantum_potential_stencil", std::move(stencil), 1));
  return out;
}

/// Residual of the real governing equation on U = Re psi and W = Im psi
/// separately, at snapshot t_index (entries "U" and "W").
inline ResidualReport subfield_check(const SecondOrderHistory& hist, const Constants& k, WaveEquation eq,
                                     std::size_t t_index) {
  if (t_index == 0 || t_index + 1 >= hist.size())
    throw Error(ErrorKind::configuration, "subfield check needs snapshots on both sides of t_index");
  const auto& a = hist.snapshots[t_index - 1];
  const auto& b = hist.snapshots[t_index];
  const auto& c = hist.snapshots[t_index + 1];
  const double dt = hist.dt;
  const double c2 = k.c * k.c;
  const double kappa2 = detail::mass_wavenumber(k) * detail::mass_wavenumber(k);
  const double g = eq == WaveEquation::telegraph ? 2.0 * k.m / k.hbar : 0.0;

  auto part = [&](auto pick) {
    auto field = [&](const ComplexField1D& f) {
      std::vector<double> v(f.size());
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = pick(f[j]);
      return RealField1D(f.grid(), std::move(v));
    };
    const RealField1D fa = field(a), fb = field(b), fc = field(c);
    const RealField1D fxx = d2(fb);
    return pointwise(
        [&](double m, double z, double p, double xx) {
          const double tt = (p - 2.0 * z + m) / (dt * dt);
          const double t1 = (p - m) / (2.0 * dt);
          return tt / c2 - xx + g * t1 + kappa2 * z;
        },
        fa, fb, fc, fxx);
  };
  ResidualReport report;
  report.entries.push_back(make_entry("U", part([](const complex& z) { return z.real(); })));
  report.entries.push_back(make_entry("W", part([](const complex& z) { return z.imag(); })));
  return report;
}

}  // namespace bohmlab::relativistic

namespace bohmlab::io {

/// x,MR2,MS2 (masked M_S^2 entries are written as 0)
inline void write_csv(const std::string& path, const relativistic::MassReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < r.M_R2.size(); ++j) rows.push_back({r.M_R2.grid().x(j), r.M_R2[j], r.M_S2[j]});
  write_table(path, {"x", "MR2", "MS2"}, rows);
}

}  // namespace bohmlab::io

#endif  // BOHMLAB_RELATIVISTIC_HPP
