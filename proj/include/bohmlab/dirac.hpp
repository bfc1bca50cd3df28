#ifndef BOHMLAB_DIRAC_HPP
#define BOHMLAB_DIRAC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bohmlab/canonical.hpp"
#include "bohmlab/field_io.hpp"
#include "bohmlab/grid.hpp"
#include "bohmlab/polar.hpp"
#include "bohmlab/residual.hpp"
#include "bohmlab/time_slice.hpp"

namespace bohmlab::dirac {

// 1+1 dimensional Dirac equation
//   i hbar psi_t = -i hbar c alpha psi_x + beta m c^2 psi
// for a two-component spinor psi = (u, w), alpha = [[0,1],[1,0]], beta = diag(1,-1).
// The chiral components chi+- = (u +- w)/sqrt(2) are the alpha eigenvectors
// and move with velocity +-c when m = 0.

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct DiracMatrices {
  Matrix2 alpha;
  Matrix2 beta;

  DiracMatrices(Matrix2 a, Matrix2 b) : alpha(a), beta(b) { check(); }

  static DiracMatrices standard() { return DiracMatrices({{{0.0, 1.0}, {1.0, 0.0}}}, {{{1.0, 0.0}, {0.0, -1.0}}}); }

  static Matrix2 product(const Matrix2& a, const Matrix2& b) {
    Matrix2 out{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return out;
  }

  /// Throws unless alpha^2 = beta^2 = I and alpha beta + beta alpha = 0, with
  /// alpha symmetric and beta diagonal.
  void check() const {
    const Matrix2 aa = product(alpha, alpha), bb = product(beta, beta);
    const Matrix2 ab = product(alpha, beta), ba = product(beta, alpha);
    constexpr double tol = 1e-14;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double id = i == j ? 1.0 : 0.0;
        if (std::abs(aa[i][j] - id) > tol || std::abs(bb[i][j] - id) > tol || std::abs(ab[i][j] + ba[i][j]) > tol)
          throw Error(ErrorKind::invalid_constant, "alpha and beta violate the Dirac algebra");
      }
    if (alpha[0][1] != alpha[1][0]) throw Error(ErrorKind::invalid_constant, "alpha must be symmetric");
    if (beta[0][1] != 0.0 || beta[1][0] != 0.0) throw Error(ErrorKind::invalid_constant, "beta must be diagonal");
  }
};

class SpinorField1D {
 public:
  SpinorField1D(Grid1D grid, std::vector<complex> u, std::vector<complex> w)
      : grid_(grid), u_(std::move(u)), w_(std::move(w)) {
    if (u_.size() != grid_.size() || w_.size() != grid_.size())
      throw Error(ErrorKind::invalid_grid, "spinor components must have one value per node");
    for (std::size_t j = 0; j < u_.size(); ++j)
      if (!bohmlab::detail::finite_value(u_[j]) || !bohmlab::detail::finite_value(w_[j]))
        throw Error(ErrorKind::non_finite, "non-finite spinor value at node " + std::to_string(j));
  }

  template <class Fn>
  static SpinorField1D tabulate(const Grid1D& grid, Fn&& fn) {
    std::vector<complex> u(grid.size()), w(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const std::pair<complex, complex> v = fn(grid.x(j));
      u[j] = v.first;
      w[j] = v.second;
    }
    return SpinorField1D(grid, std::move(u), std::move(w));
  }

  static SpinorField1D from_chiral(const ComplexField1D& plus, const ComplexField1D& minus) {
    const double s = std::numbers::sqrt2 / 2.0;
    std::vector<complex> u(plus.size()), w(plus.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      u[j] = s * (plus[j] + minus[j]);
      w[j] = s * (plus[j] - minus[j]);
    }
    return SpinorField1D(plus.grid(), std::move(u), std::move(w));
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return u_.size(); }
  const std::vector<complex>& u() const noexcept { return u_; }
  const std::vector<complex>& w() const noexcept { return w_; }

  ComplexField1D upper() const { return ComplexField1D(grid_, u_); }
  ComplexField1D lower() const { return ComplexField1D(grid_, w_); }
  ComplexField1D chiral_plus() const { return chiral(+1.0); }
  ComplexField1D chiral_minus() const { return chiral(-1.0); }

  /// sum (|u|^2 + |w|^2) dx
  double probability() const {
    double s = 0.0;
    for (std::size_t j = 0; j < u_.size(); ++j) s += std::norm(u_[j]) + std::norm(w_[j]);
    return s * grid_.dx();
  }

 private:
  ComplexField1D chiral(double sign) const {
    const double s = std::numbers::sqrt2 / 2.0;
    std::vector<complex> out(u_.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = s * (u_[j] + sign * w_[j]);
    return ComplexField1D(grid_, std::move(out));
  }

  Grid1D grid_;
  std::vector<complex> u_;
  std::vector<complex> w_;
};

struct SpinorHistory {
  std::vector<SpinorField1D> snapshots;
  /// time between stored snapshots
  double dt = 0.0;
  double t0 = 0.0;

  std::size_t size() const noexcept { return snapshots.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  const Grid1D& grid() const { return snapshots.front().grid(); }
};

inline SpinorHistory sample_history(const std::function<std::pair<complex, complex>(double, double)>& psi,
                                    const Grid1D& grid, double t0, double dt, std::size_t count) {
  SpinorHistory h;
  h.dt = dt;
  h.t0 = t0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    h.snapshots.push_back(SpinorField1D::tabulate(grid, [&](double x) { return psi(x, t); }));
  }
  return h;
}

/// Positive-energy plane-wave eigenspinor exp(i(p x - E t)/hbar) (m c^2 + E, p c) / norm.
inline std::pair<complex, complex> plane_wave_eigenspinor(double p, double x, double t, const Constants& k) {
  const double mc2 = k.m * k.c * k.c;
  const double E = std::sqrt(p * p * k.c * k.c + mc2 * mc2);
  const double a = mc2 + E, b = p * k.c;
  const double nrm = std::hypot(a, b);
  const complex phase = std::polar(1.0, (p * x - E * t) / k.hbar);
  return {phase * (a / nrm), phase * (b / nrm)};
}

/// Strang splitting: half mass rotation, one-node shift of chi+ to the right
/// and chi- to the left (exact advection when dt = dx/c), half mass rotation.
/// The grid is treated as periodic. Stores every `keep_every`-th step.
inline SpinorHistory solve_dirac(const SpinorField1D& psi0, const Constants& k, double dt, std::size_t n_steps,
                                 std::size_t keep_every = 1) {
  k.validate(true);
  const Grid1D& g = psi0.grid();
  const double cfl = k.c * dt / g.dx();
  if (!(std::abs(cfl - 1.0) <= 1e-12))
    throw Error(ErrorKind::configuration, "Dirac advection is exact only for dt = dx/c (got c dt/dx = " +
                                              std::to_string(cfl) + ")");
  if (keep_every == 0) throw Error(ErrorKind::configuration, "keep_every must be >= 1");

  const std::size_t n = g.size();
  const complex half = std::polar(1.0, -0.5 * k.m * k.c * k.c * dt / k.hbar);
  const complex half_conj = std::conj(half);

  std::vector<complex> u = psi0.u(), w = psi0.w(), plus(n), minus(n);
  SpinorHistory hist;
  hist.dt = dt * static_cast<double>(keep_every);
  hist.snapshots.push_back(psi0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t j = 0; j < n; ++j) {
      // unnormalized chiral pair (sqrt(2) chi+-); the 1/2 on the way back is exact
      const complex a = u[j] * half, b = w[j] * half_conj;
      plus[j] = a + b;
      minus[j] = a - b;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const complex p = plus[(j + n - 1) % n], m = minus[(j + 1) % n];
      u[j] = 0.5 * (p + m) * half;
      w[j] = 0.5 * (p - m) * half_conj;
    }
    if (step % keep_every == 0) hist.snapshots.emplace_back(g, u, w);
  }
  return hist;
}

/// Component-wise polar transport residuals at one time level, in the chiral basis:
///   D+R = R+_t + c R+_x - (m c^2/hbar) R+ Im(chi-/chi+)
///   D+S = S+_t + c S+_x + m c^2 Re(chi-/chi+)
/// and the mirror images for chi- with -c. The coupling terms vanish for m = 0.
/// Also reports the phase rate of each beta component, S_t + beta m c^2
/// ("upper_phase_rate", "lower_phase_rate").
inline ResidualReport dirac_transport_residuals(const SpinorHistory& hist, const Constants& k, std::size_t t_index) {
  if (t_index == 0 || t_index + 1 >= hist.size())
    throw Error(ErrorKind::configuration, "transport residuals need snapshots on both sides of t_index");
  const auto& a = hist.snapshots[t_index - 1];
  const auto& b = hist.snapshots[t_index];
  const auto& c = hist.snapshots[t_index + 1];
  const double mc2 = k.m * k.c * k.c;
  const std::size_t n = b.size();

  ResidualReport report;
  std::size_t masked_total = 0;

  auto chiral = [&](int sign) {
    auto pick = [sign](const SpinorField1D& f) { return sign > 0 ? f.chiral_plus() : f.chiral_minus(); };
    const ComplexField1D self = pick(b), other = sign > 0 ? b.chiral_minus() : b.chiral_plus();
    const PolarSlice sl = polar_slice(pick(a), self, pick(c), hist.dt, k.hbar);
    std::vector<double> dr(n, 0.0), ds(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (sl.mask[j]) continue;
      const complex ratio = other[j] / self[j];
      dr[j] = sl.R_t[j] + sign * k.c * sl.R_x[j] - mc2 / k.hbar * sl.pair.R[j] * ratio.imag();
      ds[j] = sl.S_t[j] + sign * k.c * sl.S_x[j] + mc2 * ratio.real();
    }
    const std::string tag = sign > 0 ? "+" : "-";
    report.entries.push_back(make_entry("D" + tag + "R", RealField1D(b.grid(), std::move(dr)), 1, &sl.mask));
    report.entries.push_back(make_entry("D" + tag + "S", RealField1D(b.grid(), std::move(ds)), 1, &sl.mask));
    masked_total += static_cast<std::size_t>(std::count(sl.mask.begin(), sl.mask.end(), true));
  };
  chiral(+1);
  chiral(-1);

  auto component = [&](double beta_sign, const std::string& name) {
    auto pick = [beta_sign](const SpinorField1D& f) { return beta_sign > 0 ? f.upper() : f.lower(); };
    const PolarSlice sl = polar_slice(pick(a), pick(b), pick(c), hist.dt, k.hbar);
    std::vector<double> r(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (!sl.mask[j]) r[j] = sl.S_t[j] + beta_sign * mc2;
    // a component that is empty everywhere is all-masked and contributes no nodes
    std::vector<bool> mask = sl.mask;
    if (std::all_of(sl.pair.R.values().begin(), sl.pair.R.values().end(), [](double v) { return v == 0.0; }))
      mask.assign(n, true);
    report.entries.push_back(make_entry(name, RealField1D(b.grid(), std::move(r)), 0, &mask));
  };
  component(+1.0, "upper_phase_rate");
  component(-1.0, "lower_phase_rate");

  report.masked_fraction = static_cast<double>(masked_total) / static_cast<double>(2 * n);
  report.untrusted = report.masked_fraction > untrusted_mask_fraction;
  return report;
}

struct SpinDensityRate {
  /// d/dt sum (R_u^2 S_u + R_w^2 S_w) dx by centered differences
  double rate = 0.0;
  /// -m c^2 sum (R_u^2 - R_w^2) dx
  double expected = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
};

/// Integrated spin-density balance at snapshot t_index (default: middle of the history).
inline SpinDensityRate dirac_spin_density_rate(const SpinorHistory& hist, const Constants& k,
                                               std::size_t t_index = 0) {
  if (t_index == 0) t_index = hist.size() / 2;
  if (t_index == 0 || t_index + 1 >= hist.size())
    throw Error(ErrorKind::configuration, "spin-density rate needs snapshots on both sides of t_index");
  const double dx = hist.grid().dx();

  auto weighted_action = [&](bool upper) {
    auto pick = [upper](const SpinorField1D& f) { return upper ? f.upper() : f.lower(); };
    const PolarPair mid = decompose(pick(hist.snapshots[t_index]), k.hbar);
    const PolarPair lo = decompose(pick(hist.snapshots[t_index - 1]), k.hbar);
    const PolarPair hi = decompose(pick(hist.snapshots[t_index + 1]), k.hbar);
    const RealField1D Slo = align_phase(mid.S, lo.S, k.hbar), Shi = align_phase(mid.S, hi.S, k.hbar);
    double before = 0.0, after = 0.0, density = 0.0;
    for (std::size_t j = 0; j < mid.R.size(); ++j) {
      before += lo.R[j] * lo.R[j] * Slo[j];
      after += hi.R[j] * hi.R[j] * Shi[j];
      density += mid.R[j] * mid.R[j];
    }
    return std::pair{(after - before) * dx / (2.0 * hist.dt), density * dx};
  };
  const auto [rate_u, dens_u] = weighted_action(true);
  const auto [rate_w, dens_w] = weighted_action(false);

  SpinDensityRate out;
  out.rate = rate_u + rate_w;
  out.expected = -k.m * k.c * k.c * (dens_u - dens_w);
  out.gap = out.rate - out.expected;
  out.relative_gap = out.expected != 0.0 ? std::abs(out.gap) / std::abs(out.expected) : std::abs(out.gap);
  return out;
}

/// Hamilton flow of H_S = p_S^2/m + beta m c^2 (beta = +1 branch):
///   dR/dt = p_S/(lambda m), dS/dt = 2 p_S p_lambda / m, p_S constant.
inline canonical::CanonicalTrajectory dirac_canonical_flow(double p_S, const Constants& k, double dt, std::size_t n,
                                                           canonical::CanonicalState state0 = {}) {
  canonical::require_scale(k);
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_constant, "dt must be > 0");
  state0.p_S = p_S;
  canonical::CanonicalTrajectory traj;
  traj.dt = dt;
  traj.states.push_back(state0);
  canonical::CanonicalState s = state0;
  for (std::size_t i = 1; i <= n; ++i) {
    s.R_tilde += dt * s.p_S / k.m;
    s.S_tilde += dt * 2.0 * s.p_S / k.m;
    s.t = state0.t + static_cast<double>(i) * dt;
    traj.states.push_back(s);
  }
  return traj;
}

inline double dirac_hamiltonian_s(double p_S, const Constants& k) { return p_S * p_S / k.m + k.m * k.c * k.c; }

}  // namespace bohmlab::dirac

namespace bohmlab::io {

/// x,re_u,im_u,re_w,im_w
inline void write_csv(std::ostream& out, const dirac::SpinorField1D& f) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "x,re_u,im_u,re_w,im_w\n";
  for (std::size_t j = 0; j < f.size(); ++j)
    out << f.grid().x(j) << ',' << f.u()[j].real() << ',' << f.u()[j].imag() << ',' << f.w()[j].real() << ','
        << f.w()[j].imag() << '\n';
}

inline void write_csv(const std::string& path, const dirac::SpinorField1D& f) {
  auto out = detail::open_out(path);
  write_csv(out, f);
}

}  // namespace bohmlab::io

#endif  // BOHMLAB_DIRAC_HPP
