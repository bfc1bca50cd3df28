#ifndef BOHMLAB_SCHRODINGER_HPP
#define BOHMLAB_SCHRODINGER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bohmlab/grid.hpp"
#include "bohmlab/polar.hpp"
#include "bohmlab/residual.hpp"
#include "bohmlab/stencil.hpp"
#include "bohmlab/time_slice.hpp"

namespace bohmlab::schrodinger {

// Polar split of the time-dependent Schroedinger equation
//
//   i hbar psi_t = -(hbar^2 / 2m) psi_xx + V psi,     psi = R exp(i S / hbar)
//
// together with the quantities derived from it: quantum potential, spin
// potential and force, the separated stationary solution, spin-density
// balance and the three-halves kinetic Hamiltonian.

struct FreePotential {};
struct HarmonicPotential {
  double omega;
};
struct TabulatedPotential {
  RealField1D values;
};

class PotentialSpec {
 public:
  using Kind = std::variant<FreePotential, HarmonicPotential, TabulatedPotential>;

  PotentialSpec() : kind_(FreePotential{}) {}
  PotentialSpec(Kind kind) : kind_(std::move(kind)) {
    if (auto* h = std::get_if<HarmonicPotential>(&kind_); h && !(h->omega > 0.0))
      throw Error(ErrorKind::invalid_constant, "harmonic omega must be > 0");
  }

  static PotentialSpec free() { return PotentialSpec(FreePotential{}); }
  static PotentialSpec harmonic(double omega) { return PotentialSpec(HarmonicPotential{omega}); }
  static PotentialSpec tabulated(RealField1D values) { return PotentialSpec(TabulatedPotential{std::move(values)}); }

  const Kind& kind() const noexcept { return kind_; }

  RealField1D on(const Grid1D& grid, const Constants& k) const {
    if (std::holds_alternative<FreePotential>(kind_)) return RealField1D(grid);
    if (auto* h = std::get_if<HarmonicPotential>(&kind_)) {
      const double w = h->omega;
      return RealField1D::tabulate(grid, [&](double x) { return 0.5 * k.m * w * w * x * x; });
    }
    const auto& t = std::get<TabulatedPotential>(kind_).values;
    if (t.grid() != grid) throw Error(ErrorKind::invalid_grid, "tabulated potential lives on a different grid");
    return t;
  }

 private:
  Kind kind_;
};

/// Snapshots psi(t0 + k*dt), k = 0..size-1, on one grid.
struct WaveHistory {
  std::vector<ComplexField1D> snapshots;
  double dt = 0.0;
  double t0 = 0.0;

  std::size_t size() const noexcept { return snapshots.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  const Grid1D& grid() const { return snapshots.front().grid(); }
};

/// Samples a closed-form psi(x, t) into a history.
inline WaveHistory sample_history(const std::function<complex(double, double)>& psi, const Grid1D& grid, double t0,
                                  double dt, std::size_t count) {
  WaveHistory h;
  h.dt = dt;
  h.t0 = t0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    h.snapshots.push_back(ComplexField1D::tabulate(grid, [&](double x) { return psi(x, t); }));
  }
  return h;
}

// Closed-form solutions of the free and harmonic equations, psi(x, t).
namespace families {

inline auto plane_wave(double wavenumber, const Constants& k) {
  const double omega = k.hbar * wavenumber * wavenumber / (2.0 * k.m);
  return [=](double x, double t) { return std::polar(1.0, wavenumber * x - omega * t); };
}

inline auto harmonic_ground_state(double omega, const Constants& k) {
  const double alpha = k.m * omega / k.hbar;
  const double norm = std::pow(alpha / std::numbers::pi, 0.25);
  return [=](double x, double t) { return norm * std::exp(complex(-0.5 * alpha * x * x, -0.5 * omega * t)); };
}

/// Free packet with |psi|^2 of width sigma0 at t = 0, centred at x0, mean wavenumber k0.
inline auto free_gaussian(double sigma0, double x0, double k0, const Constants& k) {
  const double v = k.hbar * k0 / k.m;
  const double s2 = sigma0 * sigma0;
  const double pre = std::pow(2.0 * std::numbers::pi * s2, -0.25);
  return [=](double x, double t) {
    const complex a(s2, k.hbar * t / (2.0 * k.m));
    const double y = x - x0 - v * t;
    return pre * std::sqrt(s2 / a) *
           std::exp(-y * y / (4.0 * a) + complex(0.0, k0 * (x - x0) - k.hbar * k0 * k0 * t / (2.0 * k.m)));
  };
}

/// sigma(t) of |psi|^2 for free_gaussian
inline double free_gaussian_width(double sigma0, double t, const Constants& k) {
  const double r = k.hbar * t / (2.0 * k.m * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

}  // namespace families

/// sum |psi|^2 dx
inline double norm(const ComplexField1D& psi) {
  double s = 0.0;
  for (const auto& v : psi.values()) s += std::norm(v);
  return s * psi.grid().dx();
}

/// Standard deviation of the position density |psi|^2.
inline double position_spread(const ComplexField1D& psi) {
  double n0 = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double w = std::norm(psi[j]);
    const double x = psi.grid().x(j);
    n0 += w;
    n1 += w * x;
    n2 += w * x * x;
  }
  const double mean = n1 / n0;
  return std::sqrt(n2 / n0 - mean * mean);
}

namespace detail {

/// LU factors (no pivoting) of a complex pentadiagonal matrix, stored by
/// diagonals: lower2[i] = A(i, i-2), lower1[i] = A(i, i-1), main[i] = A(i, i),
/// upper1[i] = A(i, i+1), upper2[i] = A(i, i+2).
class PentadiagonalLU {
 public:
  PentadiagonalLU(std::vector<complex> lower2, std::vector<complex> lower1, std::vector<complex> main,
                  std::vector<complex> upper1, std::vector<complex> upper2)
      : l2_(std::move(lower2)), l1_(std::move(lower1)), d_(std::move(main)), u1_(std::move(upper1)),
        u2_(std::move(upper2)) {
    const std::size_t n = d_.size();
    // in-place Doolittle elimination restricted to the band
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(d_[k]) == 0.0) throw Error(ErrorKind::solver_diverged, "zero pivot in banded factorization");
      if (k + 1 < n) {
        const complex f = l1_[k + 1] / d_[k];
        l1_[k + 1] = f;
        d_[k + 1] -= f * u1_[k];
        if (k + 2 < n) u1_[k + 1] -= f * u2_[k];
      }
      if (k + 2 < n) {
        const complex f = l2_[k + 2] / d_[k];
        l2_[k + 2] = f;
        l1_[k + 2] -= f * u1_[k];
        d_[k + 2] -= f * u2_[k];
      }
    }
  }

  void solve(std::vector<complex>& b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 1; i < n; ++i) {
      b[i] -= l1_[i] * b[i - 1];
      if (i >= 2) b[i] -= l2_[i] * b[i - 2];
    }
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) b[i] -= u1_[i] * b[i + 1];
      if (i + 2 < n) b[i] -= u2_[i] * b[i + 2];
      b[i] /= d_[i];
    }
  }

 private:
  std::vector<complex> l2_, l1_, d_, u1_, u2_;
};

}  // namespace detail

/// Crank-Nicolson with homogeneous Dirichlet boundaries at the two end nodes.
///
/// The kinetic term uses the fourth-order 5-point Laplacian with odd
/// reflection across the boundary nodes. The discrete Hamiltonian stays real
/// symmetric, so the propagator is a Cayley transform and preserves
/// sum |psi|^2 dx up to rounding.
inline WaveHistory solve_tdse(const ComplexField1D& psi0, const PotentialSpec& V, const Constants& k, double dt,
                              std::size_t n_steps) {
  k.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_constant, "dt must be > 0");
  const Grid1D& grid = psi0.grid();
  const std::size_t n = grid.size();
  if (n < 5) throw Error(ErrorKind::invalid_grid, "Crank-Nicolson solver needs at least 5 nodes");
  const std::size_t m = n - 2;
  const RealField1D pot = V.on(grid, k);
  const double h = grid.dx();
  // H = kin * (-f[j+2] + 16 f[j+1] - 30 f[j] + 16 f[j-1] - f[j-2]) + V f[j]
  const double kin = -k.hbar * k.hbar / (2.0 * k.m * 12.0 * h * h);

  // interior unknowns i = j - 1; ghost node outside each boundary mirrors with a sign flip
  std::vector<double> diag(m), near(m, 16.0 * kin), far(m, -kin);
  for (std::size_t i = 0; i < m; ++i) diag[i] = -30.0 * kin + pot[i + 1];
  diag.front() += kin;  // f[-1] = -f[1] contributes -(-kin) * f[1]
  diag.back() += kin;

  auto apply_h = [&](const std::vector<complex>& f, std::size_t i) {
    complex acc = diag[i] * f[i];
    if (i >= 1) acc += near[i] * f[i - 1];
    if (i + 1 < m) acc += near[i] * f[i + 1];
    if (i >= 2) acc += far[i] * f[i - 2];
    if (i + 2 < m) acc += far[i] * f[i + 2];
    return acc;
  };

  const complex tau(0.0, dt / (2.0 * k.hbar));
  std::vector<complex> l2(m), l1(m), d(m), u1(m), u2(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = 1.0 + tau * diag[i];
    l1[i] = u1[i] = tau * near[i];
    l2[i] = u2[i] = tau * far[i];
  }
  const detail::PentadiagonalLU lu(std::move(l2), std::move(l1), std::move(d), std::move(u1), std::move(u2));

  WaveHistory hist;
  hist.dt = dt;
  hist.snapshots.push_back(psi0);
  std::vector<complex> inner(psi0.values().begin() + 1, psi0.values().end() - 1);
  std::vector<complex> rhs(m), full(n);
  for (std::size_t step = 0; step < n_steps; ++step) {
    for (std::size_t i = 0; i < m; ++i) rhs[i] = inner[i] - tau * apply_h(inner, i);
    lu.solve(rhs);
    for (std::size_t i = 0; i < m; ++i)
      if (!bohmlab::detail::finite_value(rhs[i]))
        throw Error(ErrorKind::solver_diverged, "non-finite value at step " + std::to_string(step + 1));
    inner.swap(rhs);
    std::copy(inner.begin(), inner.end(), full.begin() + 1);
    hist.snapshots.emplace_back(grid, full);
  }
  return hist;
}

struct MadelungResiduals {
  /// dS/dt + (S_x)^2/2m + V - (hbar^2/2m) R_xx/R
  ResidualEntry hj;
  /// dR/dt + (R S_xx + 2 R_x S_x)/2m
  ResidualEntry continuity;
  double masked_fraction = 0.0;
  bool untrusted = false;
};

inline void require_centered(std::size_t size, std::size_t t_index) {
  if (t_index < 1 || t_index + 1 >= size)
    throw Error(ErrorKind::configuration, "time index " + std::to_string(t_index) + " needs neighbours on both sides");
}

inline MadelungResiduals madelung_residuals(const WaveHistory& hist, const PotentialSpec& V, const Constants& k,
                                            std::size_t t_index) {
  require_centered(hist.size(), t_index);
  const PolarSlice s =
      polar_slice(hist.snapshots[t_index - 1], hist.snapshots[t_index], hist.snapshots[t_index + 1], hist.dt, k.hbar);
  const RealField1D pot = V.on(hist.grid(), k);
  const std::size_t n = pot.size();
  std::vector<double> hj(n, 0.0), cont(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (s.mask[j]) continue;
    const double R = s.pair.R[j];
    hj[j] = s.S_t[j] + s.S_x[j] * s.S_x[j] / (2.0 * k.m) + pot[j] - k.hbar * k.hbar / (2.0 * k.m) * s.R_xx[j] / R;
    cont[j] = s.R_t[j] + (R * s.S_xx[j] + 2.0 * s.R_x[j] * s.S_x[j]) / (2.0 * k.m);
  }
  MadelungResiduals out{
      make_entry("hamilton_jacobi", RealField1D(pot.grid(), std::move(hj)), 1, &s.mask),
      make_entry("continuity", RealField1D(pot.grid(), std::move(cont)), 1, &s.mask),
  };
  out.masked_fraction =
      static_cast<double>(std::count(s.mask.begin(), s.mask.end(), true)) / static_cast<double>(s.mask.size());
  out.untrusted = out.masked_fraction > untrusted_mask_fraction;
  return out;
}

/// V_Q = -(hbar^2 / 2m) R_xx / R. Invariant under R -> beta R.
inline MaskedField quantum_potential(const RealField1D& R, const Constants& k) {
  const RealField1D curv = d2(R);
  std::vector<bool> mask = amplitude_mask(R.values());
  std::vector<double> out(R.size(), 0.0);
  for (std::size_t j = 0; j < R.size(); ++j)
    if (!mask[j]) out[j] = -k.hbar * k.hbar / (2.0 * k.m) * curv[j] / R[j];
  return MaskedField{RealField1D(R.grid(), std::move(out)), std::move(mask)};
}

/// V_S = -S S_xx / m. Scales as beta^2 under S -> beta S.
inline RealField1D spin_potential(const RealField1D& S, const Constants& k) {
  return pointwise([&](double s, double q) { return -s * q / k.m; }, S, d2(S));
}

// Scale laws in floating point. Scaling a field by a non-dyadic beta rounds
// every node, and d2 cancels terms much larger than its result, so the
// algebraic identities hold only up to rounding of those terms. The defects
// below divide the discrepancy by that operand scale; values of a few 1e-16
// mean the identity holds exactly up to rounding.

/// max |V_Q(beta R) - V_Q(R)| / ((hbar^2/2m) |d2|(R) / R) over unmasked nodes
inline double quantum_potential_scale_defect(const RealField1D& R, double beta, const Constants& k) {
  const MaskedField a = quantum_potential(R, k);
  const MaskedField b = quantum_potential(pointwise([&](double r) { return beta * r; }, R), k);
  const RealField1D mag = d2_magnitude(R);
  double worst = 0.0;
  for (std::size_t j = 0; j < R.size(); ++j) {
    if (a.mask[j] || b.mask[j]) continue;
    const double scale = k.hbar * k.hbar / (2.0 * k.m) * mag[j] / R[j];
    if (scale > 0.0) worst = std::max(worst, std::abs(b.values[j] - a.values[j]) / scale);
  }
  return worst;
}

/// max |V_S(beta S) - beta^2 V_S(S)| / (beta^2 |S| |d2|(S) / m)
inline double spin_potential_scale_defect(const RealField1D& S, double beta, const Constants& k) {
  const RealField1D a = spin_potential(S, k);
  const RealField1D b = spin_potential(pointwise([&](double s) { return beta * s; }, S), k);
  const RealField1D mag = d2_magnitude(S);
  double worst = 0.0;
  for (std::size_t j = 0; j < S.size(); ++j) {
    const double scale = beta * beta * std::abs(S[j]) * mag[j] / k.m;
    if (scale > 0.0) worst = std::max(worst, std::abs(b[j] - beta * beta * a[j]) / scale);
  }
  return worst;
}

struct SpinForce {
  /// S v_xx + S_xx v with v = S_x / m
  RealField1D direct;
  /// -d/dx V_S
  RealField1D gradient;
  /// nodes per side where the nested stencils lose their order
  static constexpr std::size_t band = 2;
};

inline SpinForce spin_force(const RealField1D& S, const Constants& k) {
  const RealField1D v = pointwise([&](double g) { return g / k.m; }, d1(S));
  const RealField1D direct = pointwise([](double s, double vxx, double sxx, double vv) { return s * vxx + sxx * vv; },
                                       S, d2(v), d2(S), v);
  const RealField1D gradient = pointwise([](double g) { return -g; }, d1(spin_potential(S, k)));
  return SpinForce{direct, gradient};
}

/// S(x) = 2 m E / C + (C / 4) x^2, the one-dimensional solution of
/// S S_xx / m - (S_x)^2 / 2m = E.
inline RealField1D separation_solution(double E, double C, double m, const Grid1D& grid) {
  if (C == 0.0 || !std::isfinite(C)) throw Error(ErrorKind::invalid_constant, "separation constant C must be nonzero");
  return RealField1D::tabulate(grid, [&](double x) { return 2.0 * m * E / C + 0.25 * C * x * x; });
}

/// -(hbar^2 / 2m) R_xx + V R + E R: R solves the stationary equation with total energy -E.
inline ResidualReport stationary_r_residual(const RealField1D& R, const PotentialSpec& V, double E, const Constants& k) {
  const RealField1D pot = V.on(R.grid(), k);
  RealField1D r = pointwise(
      [&](double rxx, double rv, double v) { return -k.hbar * k.hbar / (2.0 * k.m) * rxx + v * rv + E * rv; }, d2(R), R,
      pot);
  ResidualReport report;
  report.entries.push_back(make_entry("stationary_R", std::move(r)));
  return report;
}

/// <S> = sum R^2 S dx
inline double expected_action(const PolarPair& p) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.R.size(); ++j) s += p.R[j] * p.R[j] * p.S[j];
  return s * p.R.grid().dx();
}

/// <S>(t_k) for every snapshot, with each node's phase unwrapped in time
/// against the previous snapshot so windings accumulate.
inline std::vector<double> expected_action_series(const WaveHistory& hist, double hbar) {
  std::vector<double> out;
  std::optional<RealField1D> prev;
  for (const auto& snap : hist.snapshots) {
    PolarPair p = decompose(snap, hbar);
    if (prev) p.S = align_phase(*prev, p.S, hbar);
    out.push_back(expected_action(p));
    prev = p.S;
  }
  return out;
}

struct SpinDensityReport {
  /// centered difference of sum R^2 S dx
  double rate = 0.0;
  /// d(R^2 S)/dt + R^2 S_x^2/2m + R^2 V - (hbar^2/2m) R R_xx + R^2 S S_xx/m + 2 R S R_x S_x/m
  ResidualEntry balance;
  /// d(R^2 S)/dt + 2 R S R_x S_x/m + R^2 S_x^2/m, zero when S is transported conservatively
  ResidualEntry conservation_imbalance;
};

inline SpinDensityReport spin_density_rate(const WaveHistory& hist, const PotentialSpec& V, const Constants& k,
                                           std::size_t t_index) {
  require_centered(hist.size(), t_index);
  const PolarSlice s =
      polar_slice(hist.snapshots[t_index - 1], hist.snapshots[t_index], hist.snapshots[t_index + 1], hist.dt, k.hbar);
  const RealField1D pot = V.on(hist.grid(), k);
  const std::size_t n = pot.size();
  std::vector<double> bal(n, 0.0), imb(n, 0.0);
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double R = s.pair.R[j], S = s.pair.S[j];
    const double Rm = s.prev.R[j], Sm = s.prev.S[j];
    const double Rp = s.next.R[j], Sp = s.next.S[j];
    a += Rm * Rm * Sm;
    b += Rp * Rp * Sp;
    if (s.mask[j]) continue;
    const double d_r2s = (Rp * Rp * Sp - Rm * Rm * Sm) / (2.0 * hist.dt);
    const double sx = s.S_x[j], rx = s.R_x[j];
    bal[j] = d_r2s + R * R * sx * sx / (2.0 * k.m) + R * R * pot[j] - k.hbar * k.hbar / (2.0 * k.m) * R * s.R_xx[j] +
             R * R * S * s.S_xx[j] / k.m + 2.0 * R * S * rx * sx / k.m;
    imb[j] = d_r2s + 2.0 * R * S * sx * rx / k.m + R * R * sx * sx / k.m;
  }
  SpinDensityReport out;
  out.rate = (b - a) * hist.grid().dx() / (2.0 * hist.dt);
  out.balance = make_entry("spin_density_balance", RealField1D(pot.grid(), std::move(bal)), 1, &s.mask);
  out.conservation_imbalance = make_entry("spin_conservation", RealField1D(pot.grid(), std::move(imb)), 1, &s.mask);
  return out;
}

/// H_p = p^2/2m + p^2/m + E
inline double hp_energy(double p, double E, double m) { return 1.5 * p * p / m + E; }

}  // namespace bohmlab::schrodinger

#endif  // BOHMLAB_SCHRODINGER_HPP
