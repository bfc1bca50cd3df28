#ifndef BOHMLAB_LAB_SCENARIOS_HPP
#define BOHMLAB_LAB_SCENARIOS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bohmlab/canonical.hpp"
#include "bohmlab/dirac.hpp"
#include "bohmlab/field_io.hpp"
#include "bohmlab/identities.hpp"
#include "bohmlab/lab/config.hpp"
#include "bohmlab/lab/report.hpp"
#include "bohmlab/polar.hpp"
#include "bohmlab/relativistic.hpp"
#include "bohmlab/schrodinger.hpp"

namespace bohmlab::lab {

/// Keys every scenario may use.
inline const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys{"id",     "module", "operation", "paper_ref", "hbar", "m",     "c",
                                          "lambda", "p_lambda", "C",     "A",         "E",    "x_min", "x_max",
                                          "n",      "dt",     "steps"};
  return keys;
}

/// Writes CSV artifacts under <out>/<id>/ and records their relative paths.
/// With no output directory nothing is written.
class Artifacts {
 public:
  Artifacts(std::optional<std::filesystem::path> out, std::string id) : out_(std::move(out)), id_(std::move(id)) {}

  template <class T>
  void field(const std::string& name, const T& value) {
    if (!out_) return;
    const std::filesystem::path dir = *out_ / id_;
    std::filesystem::create_directories(dir);
    io::write_csv((dir / name).string(), value);
    paths_.push_back(id_ + "/" + name);
  }

  void table(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
    if (!out_) return;
    const std::filesystem::path dir = *out_ / id_;
    std::filesystem::create_directories(dir);
    io::write_table((dir / name).string(), header, rows);
    paths_.push_back(id_ + "/" + name);
  }

  const std::vector<std::string>& paths() const noexcept { return paths_; }

 private:
  std::optional<std::filesystem::path> out_;
  std::string id_;
  std::vector<std::string> paths_;
};

/// Parsed scenario: the config plus the constants and grid built from it.
struct Scenario {
  Config cfg;
  std::string id;
  std::string module;
  std::string operation;
  std::string paper_ref;
  Constants k;

  double number(const std::string& key, double fallback) const { return cfg.number(key, fallback); }
  std::size_t count(const std::string& key, std::size_t fallback) const { return cfg.count(key, fallback); }
  std::string text(const std::string& key, const std::string& fallback) const { return cfg.text(key, fallback); }

  Grid1D grid(double x_min, double x_max, std::size_t n) const {
    return Grid1D(number("x_min", x_min), number("x_max", x_max), count("n", n));
  }
  /// Periodic grid over [x_min, x_min + period) with n nodes.
  Grid1D periodic_grid(double x_min, double period, std::size_t n) const {
    const double lo = number("x_min", x_min);
    return Grid1D::periodic(lo, number("x_max", lo + period) - lo, count("n", n));
  }
};

struct Operation {
  std::string module;
  std::string name;
  std::vector<std::string> params;
  std::vector<CheckSpec> checks;
  std::function<std::vector<Measurement>(const Scenario&, Artifacts&)> run;
};

namespace ops {

constexpr double pi = std::numbers::pi;

inline RealField1D difference(const RealField1D& a, const RealField1D& b) {
  return pointwise([](double p, double q) { return p - q; }, a, b);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- field core

inline Operation vector_identity() {
  return {"field-core",
          "vector_identity",
          {"amplitude", "wavenumber", "curvature"},
          {{"vector_identity", "max", 1e-2, 1.9}},
          [](const Scenario& s, Artifacts& out) {
            const double a = s.number("amplitude", 1.0), w = s.number("wavenumber", 1.3), b = s.number("curvature", 0.3);
            auto S = [=](double x) { return a * std::sin(w * x) + b * x * x; };
            const Grid1D g = s.grid(-2.0, 2.0, 201);
            ResidualReport rep = vector_identity_residual(S, g);
            const ResidualEntry& e = rep.entries.front();
            out.field("vector_identity_residual.csv", *e.field);
            return std::vector<Measurement>{{"vector_identity", e.norms.max, e.order}};
          }};
}

inline Operation polar_round_trip() {
  return {"field-core",
          "polar_round_trip",
          {"sigma", "x0", "k0"},
          {{"round_trip", "max", 1e-12, std::nullopt}, {"uw_amplitude", "max", 1e-12, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            const auto packet = schrodinger::families::free_gaussian(s.number("sigma", 0.7), s.number("x0", 0.0),
                                                                     s.number("k0", 3.0), s.k);
            const Grid1D g = s.grid(-5.0, 5.0, 401);
            const ComplexField1D psi = ComplexField1D::tabulate(g, [&](double x) { return packet(x, 0.0); });
            const PolarPair pair = decompose(psi, s.k.hbar);
            const ComplexField1D back = recompose(pair, s.k.hbar);
            double worst = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(back[j] - psi[j]));
            const UWSplit uw = split_uw(pair, s.k.hbar);
            out.field("psi.csv", psi);
            out.field("R.csv", pair.R);
            out.field("S.csv", pair.S);
            return std::vector<Measurement>{{"round_trip", worst, std::nullopt},
                                            {"uw_amplitude", uw.amplitude_mismatch, std::nullopt}};
          }};
}

// ------------------------------------------------------------ schrodinger-bohm

inline Operation separation() {
  return {"schrodinger-bohm",
          "separation",
          {},
          {{"separation_analytic", "max", 1e-12, std::nullopt}, {"separation_stencil", "max", 1e-6, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            const double E = s.k.E.value_or(1.0), C = s.k.C.value_or(2.0), m = s.k.m;
            const Grid1D g = s.grid(-5.0, 5.0, 1024);
            const RealField1D S = schrodinger::separation_solution(E, C, m, g);
            double analytic = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
              const double x = g.x(j);
              const double v = 2.0 * m * E / C + 0.25 * C * x * x, p = 0.5 * C * x, lap = 0.5 * C;
              analytic = std::max(analytic, std::abs(v * lap / m - p * p / (2.0 * m) - E));
            }
            const RealField1D r = pointwise([&](double v, double p, double lap) { return v * lap / m - p * p / (2.0 * m) - E; },
                                            S, d1(S), d2(S));
            out.field("S.csv", S);
            out.field("separation_residual.csv", r);
            return std::vector<Measurement>{{"separation_analytic", analytic, std::nullopt},
                                            {"separation_stencil", max_abs(r.values()), std::nullopt}};
          }};
}

inline Operation spin_potential() {
  return {"schrodinger-bohm",
          "spin_potential",
          {"order_x_min", "order_x_max", "order_n"},
          {{"VS_matches_paper", "max", 1e-6, std::nullopt},
           {"force_closed_form", "max", 1e-6, std::nullopt},
           {"force_forms_agree", "max", 1e-3, 1.95}},
          [](const Scenario& s, Artifacts& out) {
            const double E = s.k.E.value_or(1.0), C = s.k.C.value_or(2.0), m = s.k.m;
            const Grid1D g = s.grid(-5.0, 5.0, 1024);
            const RealField1D S = schrodinger::separation_solution(E, C, m, g);
            const RealField1D VS = schrodinger::spin_potential(S, s.k);
            const schrodinger::SpinForce F = schrodinger::spin_force(S, s.k);
            double vs_err = 0.0, f_err = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
              const double x = g.x(j);
              vs_err = std::max(vs_err, std::abs(VS[j] - (-E - C * C * x * x / (8.0 * m))));
              const double f = C * C * x / (4.0 * m);
              f_err = std::max({f_err, std::abs(F.direct[j] - f), std::abs(F.gradient[j] - f)});
            }
            out.field("VS.csv", VS);
            out.field("force.csv", F.direct);

            // agreement of the two force forms on a generic smooth action
            auto profile = [](double x) { return std::sin(1.3 * x) + 0.5 * std::cos(0.7 * x) + 0.1 * x * x * x; };
            auto gap = [&](const Grid1D& grid) {
              const schrodinger::SpinForce f = schrodinger::spin_force(RealField1D::tabulate(grid, profile), s.k);
              return interior_norms(difference(f.direct, f.gradient), schrodinger::SpinForce::band).max;
            };
            const Grid1D og(s.number("order_x_min", -3.0), s.number("order_x_max", 3.0), s.count("order_n", 481));
            const double coarse = gap(og), fine = gap(og.refined());
            return std::vector<Measurement>{{"VS_matches_paper", vs_err, std::nullopt},
                                            {"force_closed_form", f_err, std::nullopt},
                                            {"force_forms_agree", fine, refinement(coarse, fine)}};
          }};
}

inline Operation scale_laws() {
  return {"schrodinger-bohm",
          "scale_laws",
          {"betas"},
          {{"VQ_scale_invariance", "max_defect", 1e-14, std::nullopt},
           {"VS_scale_quadratic", "max_defect", 1e-14, std::nullopt}},
          [](const Scenario& s, Artifacts&) {
            const Grid1D g = s.grid(-4.0, 4.0, 161);
            const RealField1D R =
                RealField1D::tabulate(g, [](double x) { return std::exp(-0.5 * x * x) * (1.0 + 0.3 * std::sin(2.0 * x)); });
            const RealField1D S = RealField1D::tabulate(g, [](double x) { return std::sin(x) + 0.2 * x * x; });
            double q = 0.0, v = 0.0;
            for (double beta : s.cfg.numbers("betas", {0.5, 2.0, 3.7})) {
              q = std::max(q, schrodinger::quantum_potential_scale_defect(R, beta, s.k));
              v = std::max(v, schrodinger::spin_potential_scale_defect(S, beta, s.k));
            }
            return std::vector<Measurement>{{"VQ_scale_invariance", q, std::nullopt},
                                            {"VS_scale_quadratic", v, std::nullopt}};
          }};
}

/// Madelung residuals on a closed-form family, from sampled snapshots
/// ("analytic") or from the Crank-Nicolson solver ("solver"), on a grid and
/// its refinement with dt halved.
inline Operation madelung() {
  return {"schrodinger-bohm",
          "madelung",
          {"family", "source", "wavenumber", "omega", "sigma", "x0", "k0", "t0"},
          {{"hamilton_jacobi", "max", 0.5, 1.8}, {"continuity", "max", 0.5, 1.8}},
          [](const Scenario& s, Artifacts& out) {
            using namespace schrodinger;
            const std::string family = s.text("family", "harmonic");
            const std::string source = s.text("source", "analytic");
            const double t0 = s.number("t0", 0.0);
            std::function<complex(double, double)> psi;
            PotentialSpec V = PotentialSpec::free();
            if (family == "plane_wave") {
              psi = families::plane_wave(s.number("wavenumber", 2.0), s.k);
            } else if (family == "harmonic") {
              const double w = s.number("omega", 1.0);
              psi = families::harmonic_ground_state(w, s.k);
              V = PotentialSpec::harmonic(w);
            } else if (family == "gaussian") {
              psi = families::free_gaussian(s.number("sigma", 1.0), s.number("x0", -2.0), s.number("k0", 1.5), s.k);
            } else {
              s.cfg.fail(s.cfg.line_of("family"), "unknown family `" + family + "`");
            }
            if (source != "analytic" && source != "solver")
              s.cfg.fail(s.cfg.line_of("source"), "source must be `analytic` or `solver`");
            if (source == "solver" && family == "plane_wave")
              s.cfg.fail(s.cfg.line_of("source"), "the solver has Dirichlet ends; use an analytic plane wave");

            const Grid1D g0 = s.grid(-8.0, 8.0, 161);
            const double dt0 = s.number("dt", 0.02);
            const std::size_t steps0 = s.count("steps", 10);
            MadelungResiduals res[2];
            for (int lev = 0; lev < 2; ++lev) {
              const Grid1D g = lev ? g0.refined() : g0;
              const double dt = lev ? 0.5 * dt0 : dt0;
              WaveHistory h;
              if (source == "analytic") {
                h = sample_history(psi, g, t0, dt, 3);
              } else {
                const ComplexField1D start = ComplexField1D::tabulate(g, [&](double x) { return psi(x, t0); });
                h = solve_tdse(start, V, s.k, dt, lev ? 2 * steps0 : steps0);
              }
              const std::size_t at = source == "analytic" ? 1 : h.size() - 2;
              res[lev] = madelung_residuals(h, V, s.k, at);
            }
            out.field("hamilton_jacobi_residual.csv", *res[1].hj.field);
            out.field("continuity_residual.csv", *res[1].continuity.field);
            return std::vector<Measurement>{
                {"hamilton_jacobi", res[1].hj.norms.max, refinement(res[0].hj.norms.max, res[1].hj.norms.max)},
                {"continuity", res[1].continuity.norms.max,
                 refinement(res[0].continuity.norms.max, res[1].continuity.norms.max)}};
          }};
}

// --------------------------------------------------------- canonical-dynamics

inline void trajectory_table(Artifacts& out, const canonical::CanonicalTrajectory& traj, const Constants& k) {
  std::vector<std::vector<double>> rows;
  for (const auto& st : traj.states) rows.push_back({st.t, st.R(k), st.S(k), st.p_R, st.p_S});
  out.table("trajectory.csv", {"t", "R", "S", "pR", "pS"}, rows);
}

inline canonical::CanonicalState start_state(const Scenario& s) {
  return canonical::CanonicalState{s.number("R_tilde0", 0.0), s.number("S_tilde0", 0.0), s.number("p_R0", 0.0),
                                   s.number("p_S", 1.0), 0.0};
}

inline Operation reduced_flow() {
  return {"canonical-dynamics",
          "reduced_flow",
          {"p_S", "R_tilde0", "S_tilde0", "p_R0", "potential"},
          {{"action_amplitude_relation", "relative", 1e-10, std::nullopt},
           {"slope_dS_dR", "relative", 1e-10, std::nullopt},
           {"pS_drift", "relative", 1e-12, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            const std::string pot = s.text("potential", "zero");
            canonical::PotentialDependence dep = canonical::PotentialDependence::zero;
            if (pot == "of_R") dep = canonical::PotentialDependence::of_R;
            else if (pot == "of_S") dep = canonical::PotentialDependence::of_S;
            else if (pot != "zero") s.cfg.fail(s.cfg.line_of("potential"), "potential must be zero, of_R or of_S");
            const auto s0 = start_state(s);
            const auto traj = canonical::integrate_reduced(s0, s.k, dep, s.number("dt", 0.01), s.count("steps", 1000));
            trajectory_table(out, traj, s.k);
            const double h = s.k.planck();
            const auto& last = traj.states.back();
            const double dS = last.S(s.k) - s0.S(s.k), dR = last.R(s.k) - s0.R(s.k);
            double drift = 0.0;
            for (const auto& st : traj.states) drift = std::max(drift, std::abs(st.p_S - s0.p_S));
            return std::vector<Measurement>{
                {"action_amplitude_relation", std::abs(dS - h * dR) / std::abs(dS), std::nullopt},
                {"slope_dS_dR", std::abs(canonical::slope_dS_dR(traj, s.k) - h) / h, std::nullopt},
                {"pS_drift", drift / std::abs(s0.p_S), std::nullopt}};
          }};
}

inline Operation p_r_rate() {
  return {"canonical-dynamics",
          "p_r_rate",
          {},
          {{"pR_rate_constant", "max", 1e-3, 1.9}},
          [](const Scenario& s, Artifacts& out) {
            const double E = s.k.E.value_or(1.0), C = s.k.C.value_or(2.0);
            const double expected = -s.k.hbar * C / (4.0 * s.k.m * *s.k.lambda);
            const Grid1D g0 = s.grid(-5.0, 5.0, 101);
            double err[2];
            for (int lev = 0; lev < 2; ++lev) {
              const Grid1D g = lev ? g0.refined() : g0;
              const RealField1D S = schrodinger::separation_solution(E, C, s.k.m, g);
              const RealField1D R = RealField1D::tabulate(g, [](double) { return 1.0; });
              const MaskedField rate = canonical::p_r_rate_diagnostic(R, S, s.k);
              const RealField1D dev = pointwise([&](double v) { return v - expected; }, rate.values);
              err[lev] = interior_norms(dev, 2, &rate.mask).max;
              if (lev) out.field("pR_rate.csv", rate.values);
            }
            return std::vector<Measurement>{{"pR_rate_constant", err[1], refinement(err[0], err[1])}};
          }};
}

// ------------------------------------------------------------------ dirac-1d

inline Operation dirac_canonical_flow() {
  return {"dirac-1d",
          "canonical_flow",
          {"p_S", "R_tilde0", "S_tilde0", "p_R0"},
          {{"slope_dS_dR", "relative", 1e-10, std::nullopt},
           {"action_amplitude_relation", "relative", 1e-10, std::nullopt},
           {"HS_drift", "max", 1e-14, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            const auto s0 = start_state(s);
            const auto traj = dirac::dirac_canonical_flow(s0.p_S, s.k, s.number("dt", 0.01), s.count("steps", 1000), s0);
            trajectory_table(out, traj, s.k);
            const double h2 = 2.0 * s.k.planck();
            const auto& a = traj.states.front();
            const auto& b = traj.states.back();
            const double dS = b.S(s.k) - a.S(s.k), dR = b.R(s.k) - a.R(s.k);
            const double H0 = dirac::dirac_hamiltonian_s(a.p_S, s.k);
            double drift = 0.0;
            for (const auto& st : traj.states) drift = std::max(drift, std::abs(dirac::dirac_hamiltonian_s(st.p_S, s.k) - H0));
            return std::vector<Measurement>{
                {"slope_dS_dR", std::abs(canonical::slope_dS_dR(traj, s.k) - h2) / h2, std::nullopt},
                {"action_amplitude_relation", std::abs(dS - h2 * dR) / std::abs(dS), std::nullopt},
                {"HS_drift", drift, std::nullopt}};
          }};
}

/// Two counter-propagating chiral components with smooth periodic
/// amplitudes and chirped phases (an exact massless solution).
inline std::pair<complex, complex> chiral_packet(double x, double t, const Constants& k) {
  const double xp = (x - k.c * t) / k.hbar, xm = (x + k.c * t) / k.hbar;
  const complex plus = (1.5 + std::sin(xp)) * std::polar(1.0, 2.0 * xp + 0.3 * std::sin(xp));
  const complex minus = (1.5 + std::cos(2.0 * xm)) * std::polar(1.0, -xm + 0.2 * std::cos(xm));
  const double r = std::numbers::sqrt2 / 2.0;
  return {r * (plus + minus), r * (plus - minus)};
}

inline Operation dirac_transport() {
  return {"dirac-1d",
          "transport",
          {},
          {{"D+R", "max", 1e-2, 1.9},
           {"D+S", "max", 1e-2, 1.9},
           {"D-R", "max", 1e-2, 1.9},
           {"D-S", "max", 1e-2, 1.9},
           {"solver_transport", "max", 1e-10, std::nullopt},
           {"probability_drift", "relative", 1e-12, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            Constants k = s.k;
            if (k.m != 0.0) s.cfg.fail(s.cfg.line_of("m"), "transport scenario is massless; set m = 0");
            const Grid1D g0 = s.periodic_grid(0.0, 2.0 * pi * k.hbar, 128);
            const char* names[] = {"D+R", "D+S", "D-R", "D-S"};
            double res[2][4];
            for (int lev = 0; lev < 2; ++lev) {
              const Grid1D g = Grid1D::periodic(g0.x_min(), g0.period(), lev ? 2 * g0.size() : g0.size());
              const auto hist = dirac::sample_history([&](double x, double t) { return chiral_packet(x, t, k); }, g,
                                                      0.0, 0.5 * g.dx() / k.c, 3);
              const auto rep = dirac::dirac_transport_residuals(hist, k, 1);
              for (int q = 0; q < 4; ++q) res[lev][q] = rep.at(names[q]).norms.max;
            }
            std::vector<Measurement> m;
            for (int q = 0; q < 4; ++q) m.push_back({names[q], res[1][q], refinement(res[0][q], res[1][q])});

            const auto psi0 = dirac::SpinorField1D::tabulate(g0, [&](double x) { return chiral_packet(x, 0.0, k); });
            const std::size_t steps = s.count("steps", 200);
            const auto hist = dirac::solve_dirac(psi0, k, g0.dx() / k.c, steps);
            double solver = 0.0;
            const auto rep = dirac::dirac_transport_residuals(hist, k, steps / 2);
            for (const char* name : names) solver = std::max(solver, rep.at(name).norms.max);
            const double p0 = psi0.probability();
            double drift = 0.0;
            for (const auto& f : hist.snapshots) drift = std::max(drift, std::abs(f.probability() - p0) / p0);
            out.field("spinor_final.csv", hist.snapshots.back());
            m.push_back({"solver_transport", solver, std::nullopt});
            m.push_back({"probability_drift", drift, std::nullopt});
            return m;
          }};
}

inline Operation dirac_rest_state() {
  return {"dirac-1d",
          "rest_state",
          {"amplitude"},
          {{"upper_phase_rate", "max", 1e-8, std::nullopt},
           {"spin_density_balance", "relative", 1e-6, std::nullopt},
           {"probability_drift", "relative", 1e-12, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            const Grid1D g = s.periodic_grid(0.0, 2.0 * pi, 64);
            const double a = s.number("amplitude", 1.0);
            const dirac::SpinorField1D psi0(g, std::vector<complex>(g.size(), a), std::vector<complex>(g.size(), 0.0));
            const std::size_t steps = s.count("steps", 20);
            const auto hist = dirac::solve_dirac(psi0, s.k, g.dx() / s.k.c, steps);
            const auto rep = dirac::dirac_transport_residuals(hist, s.k, steps / 2);
            const auto balance = dirac::dirac_spin_density_rate(hist, s.k, steps / 2);
            double drift = 0.0;
            for (const auto& f : hist.snapshots)
              drift = std::max(drift, std::abs(f.probability() - psi0.probability()) / psi0.probability());
            out.field("spinor_final.csv", hist.snapshots.back());
            return std::vector<Measurement>{{"upper_phase_rate", rep.at("upper_phase_rate").norms.max, std::nullopt},
                                            {"spin_density_balance", balance.relative_gap, std::nullopt},
                                            {"probability_drift", drift, std::nullopt}};
          }};
}

// -------------------------------------------------------- relativistic-waves

inline Operation kg_plane_wave() {
  return {"relativistic-waves",
          "kg_plane_wave",
          {"p", "t_end"},
          {{"amplitude_residual", "max", 1e-6, std::nullopt},
           {"phase_residual", "max", 1e-6, std::nullopt},
           {"MR2_dispersion_family", "max", 1e-10, std::nullopt},
           {"energy_drift", "relative", 1e-8, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            using namespace relativistic;
            const Constants& k = s.k;
            const double p = s.number("p", 1.0);
            const double w = std::sqrt(p * p * k.c * k.c + std::pow(k.m * k.c * k.c, 2)) / k.hbar;
            auto wave = [&](double x, double t) { return std::polar(1.0, p * x / k.hbar - w * t); };
            const Grid1D g = s.periodic_grid(0.0, 2.0 * pi * k.hbar / std::max(std::abs(p), 1e-300), 4096);
            const auto phi0 = ComplexField1D::tabulate(g, [&](double x) { return wave(x, 0.0); });
            const auto dphi0 = ComplexField1D::tabulate(g, [&](double x) { return complex(0.0, -w) * wave(x, 0.0); });
            const double dt = s.number("dt", 0.5 * g.dx() / k.c);
            const auto steps = static_cast<std::size_t>(std::lround(s.number("t_end", 1.0) / dt));
            const auto hist = solve_kg(phi0, dphi0, k, dt, steps);
            const auto rep = kg_polar_residuals(hist, k, hist.size() - 2);
            double drift = 0.0;
            for (double e : hist.energy) drift = std::max(drift, std::abs(e - hist.energy.front()) / hist.energy.front());
            out.field("masses.csv", effective_masses(hist, k, hist.size() - 2));
            out.field("phi_final.csv", hist.snapshots.back());

            // closed-form members of the family, derivatives by centered differences
            const Grid1D fg(-1.0, 1.0, 101);
            const auto sampled = sample_history(wave, fg, 0.0, 0.05, 3);
            const MassReport masses = effective_masses(sampled, k, 1);
            const double mr2 = interior_norms(masses.M_R2).max;
            return std::vector<Measurement>{{"amplitude_residual", rep.at("amplitude").norms.max, std::nullopt},
                                            {"phase_residual", rep.at("phase").norms.max, std::nullopt},
                                            {"MR2_dispersion_family", mr2, std::nullopt},
                                            {"energy_drift", drift, std::nullopt}};
          }};
}

inline Operation telegraph_decay() {
  return {"relativistic-waves",
          "telegraph_decay",
          {"residual_dt"},
          {{"solver_error", "relative", 1e-6, std::nullopt},
           {"solver_order", "relative", 1e-6, 1.9},
           {"amplitude_residual", "max", 1e-8, std::nullopt},
           {"phase_residual", "max", 1e-8, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            using namespace relativistic;
            const Constants& k = s.k;
            const double rate = k.m * k.c * k.c / k.hbar;
            const double t_end = 1.0 / rate;
            const Grid1D g = s.grid(0.0, 1.0, 64);
            const auto f0 = ComplexField1D::tabulate(g, [](double) { return complex(1.0); });
            const auto fd = ComplexField1D::tabulate(g, [&](double) { return complex(-rate); });
            const double dt0 = s.number("dt", 1e-3 * t_end);
            double err[2];
            for (int lev = 0; lev < 2; ++lev) {
              const double dt = lev ? 0.5 * dt0 : dt0;
              const auto steps = static_cast<std::size_t>(std::lround(t_end / dt));
              const auto h = solve_telegraph(f0, fd, k, dt, steps, steps);
              const double exact = std::exp(-rate * static_cast<double>(steps) * dt);
              err[lev] = 0.0;
              for (const auto& v : h.snapshots.back().values())
                err[lev] = std::max(err[lev], std::abs(v - exact) / exact);
              if (!lev) out.field("psi_final.csv", h.snapshots.back());
            }
            const auto sampled = sample_history([&](double, double t) { return complex(std::exp(-rate * t)); }, g,
                                                0.5 * t_end, s.number("residual_dt", 1e-4 * t_end), 3);
            const auto rep = telegraph_polar_residuals(sampled, k, 1);
            return std::vector<Measurement>{{"solver_error", err[0], std::nullopt},
                                            {"solver_order", err[1], refinement(err[0], err[1])},
                                            {"amplitude_residual", rep.at("amplitude").norms.max, std::nullopt},
                                            {"phase_residual", rep.at("phase").norms.max, std::nullopt}};
          }};
}

/// S = -gamma m c^2 (t - v x / c^2) + offset sampled on a grid at three time
/// levels; S_t and S_x by centered differences.
inline Operation hyperbola() {
  return {"relativistic-waves",
          "hyperbola",
          {"velocities", "offset", "t0"},
          {{"hyperbola_defect", "max", 1e-12, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            using namespace relativistic;
            const Constants& k = s.k;
            const Grid1D g = s.grid(-1.0, 1.0, 21);
            const double dt = s.number("dt", 0.1), t0 = s.number("t0", 0.0), offset = s.number("offset", 0.0);
            double worst = 0.0;
            std::vector<std::vector<double>> rows;
            for (double beta : s.cfg.numbers("velocities", {0.0, 0.3, 0.6, 0.9})) {
              if (!(std::abs(beta) < 1.0)) s.cfg.fail(s.cfg.line_of("velocities"), "velocities are fractions of c in (-1, 1)");
              const double v = beta * k.c;
              const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
              auto S = [&](double t) {
                return RealField1D::tabulate(g, [&](double x) { return -gamma * k.m * k.c * k.c * (t - v * x / (k.c * k.c)) + offset; });
              };
              const RealField1D before = S(t0 - dt), now = S(t0), after = S(t0 + dt);
              const RealField1D St = pointwise([&](double a, double b) { return (b - a) / (2.0 * dt); }, before, after);
              const RealField1D c = hyperbola_constraint(St, d1(now), k);
              for (double value : c.values()) worst = std::max(worst, std::abs(value - 1.0));
              rows.push_back({beta, *std::min_element(c.values().begin(), c.values().end()),
                              *std::max_element(c.values().begin(), c.values().end())});
            }
            out.table("hyperbola.csv", {"v_over_c", "min", "max"}, rows);
            return std::vector<Measurement>{{"hyperbola_defect", worst, std::nullopt}};
          }};
}

inline Operation static_case() {
  return {"relativistic-waves",
          "static_case",
          {"R0", "R0_prime", "substeps"},
          {{"first_integral", "max", 1e-12, std::nullopt},
           {"VQ_closed_form_ode", "max", 1e-10, std::nullopt},
           {"VQ_closed_form_stencil", "max", 1e-4, 1.9},
           {"closed_form_R", "relative", 1e-10, std::nullopt}},
          [](const Scenario& s, Artifacts& out) {
            using namespace relativistic;
            const Constants& k = s.k;
            const double A = k.A.value_or(0.0);
            const double R0 = s.number("R0", 1.0);
            const double kappa = k.m * k.c / k.hbar;
            const double R0p = s.number("R0_prime", kappa * R0);
            const std::size_t sub = s.count("substeps", 8);
            const Grid1D g = s.grid(-1.0, 1.0, 201);
            const StaticCase coarse = static_special_case(R0, R0p, A, k, g, sub);
            const StaticCase fine = static_special_case(R0, R0p, A, k, g.refined(), sub);
            out.field("R.csv", coarse.R);
            out.field("S.csv", coarse.S);
            const double st0 = coarse.checks.at("quantum_potential_stencil").norms.max;
            const double st1 = fine.checks.at("quantum_potential_stencil").norms.max;
            std::vector<Measurement> m{{"first_integral", coarse.checks.at("first_integral").norms.max, std::nullopt},
                                       {"VQ_closed_form_ode", coarse.checks.at("quantum_potential_ode").norms.max,
                                        std::nullopt},
                                       {"VQ_closed_form_stencil", st1, refinement(st0, st1)}};
            if (A == 0.0) {
              // linear case: R = R0 cosh(kappa (x - x0)) + (R0'/kappa) sinh(kappa (x - x0))
              double worst = 0.0;
              for (std::size_t j = 0; j < g.size(); ++j) {
                const double y = kappa * (g.x(j) - g.x_min());
                const double exact = R0 * std::cosh(y) + R0p / kappa * std::sinh(y);
                worst = std::max(worst, std::abs(coarse.R[j] - exact) / std::abs(exact));
              }
              m.push_back({"closed_form_R", worst, std::nullopt});
            }
            return m;
          }};
}

}  // namespace ops

inline const std::vector<Operation>& registry() {
  static const std::vector<Operation> all{
      ops::vector_identity(), ops::polar_round_trip(),     ops::separation(),       ops::spin_potential(),
      ops::scale_laws(),      ops::madelung(),             ops::reduced_flow(),     ops::p_r_rate(),
      ops::dirac_canonical_flow(), ops::dirac_transport(), ops::dirac_rest_state(), ops::kg_plane_wave(),
      ops::telegraph_decay(), ops::hyperbola(),            ops::static_case(),
  };
  return all;
}

inline const Operation& find_operation(const Config& cfg, const std::string& module, const std::string& name) {
  for (const auto& op : registry())
    if (op.module == module && op.name == name) return op;
  bool module_known = false;
  for (const auto& op : registry()) module_known = module_known || op.module == module;
  if (!module_known) cfg.fail(cfg.line_of("module"), "unknown module `" + module + "`");
  cfg.fail(cfg.line_of("operation"), "module `" + module + "` has no operation `" + name + "`");
}

}  // namespace bohmlab::lab

#endif  // BOHMLAB_LAB_SCENARIOS_HPP
