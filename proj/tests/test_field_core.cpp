#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bohmlab/field_io.hpp"
#include "bohmlab/identities.hpp"
#include "bohmlab/polar.hpp"
#include "bohmlab/stencil.hpp"

using namespace bohmlab;

namespace {

constexpr double pi = std::numbers::pi;

double interior_max_error(const RealField1D& f, const std::function<double(double)>& exact, std::size_t band = 1) {
  double e = 0.0;
  for (std::size_t j = band; j + band < f.size(); ++j) e = std::max(e, std::abs(f[j] - exact(f.grid().x(j))));
  return e;
}

// Random smooth complex field: a few Gaussian bumps with random phases riding
// on a positive floor so min |psi| stays well above the mask threshold.
ComplexField1D random_smooth_field(std::mt19937_64& rng, const Grid1D& grid) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double k1 = 2.0 * u(rng), k2 = 1.5 * u(rng), c1 = 3.0 * u(rng), c2 = 3.0 * u(rng);
  const double a1 = 0.5 + 0.5 * std::abs(u(rng)), a2 = 0.5 * std::abs(u(rng));
  return ComplexField1D::tabulate(grid, [&](double x) {
    const double amp = 0.2 + a1 * std::exp(-(x - c1) * (x - c1)) + a2 * std::exp(-0.5 * (x - c2) * (x - c2));
    const double phase = k1 * x + 0.3 * std::sin(k2 * x);
    return std::polar(amp, phase);
  });
}

}  // namespace

TEST(Grid, RejectsTooFewNodes) {
  try {
    Grid1D g(0.0, 1.0, 2);
    FAIL() << "expected invalid-grid";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_grid);
  }
  EXPECT_THROW(Grid1D(1.0, 1.0, 10), Error);
}

TEST(Grid, SpacingAndRefinement) {
  Grid1D g(-5.0, 5.0, 11);
  EXPECT_DOUBLE_EQ(g.dx(), 1.0);
  EXPECT_DOUBLE_EQ(g.x(10), 5.0);
  EXPECT_DOUBLE_EQ(g.refined().dx(), 0.5);
  Grid1D p = Grid1D::periodic(0.0, 2.0 * pi, 256);
  EXPECT_NEAR(p.period(), 2.0 * pi, 1e-14);
}

TEST(Field, RejectsNonFiniteAndSizeMismatch) {
  Grid1D g(0.0, 1.0, 4);
  EXPECT_THROW(RealField1D(g, {1.0, 2.0, 3.0}), Error);
  EXPECT_THROW(RealField1D(g, {1.0, 2.0, NAN, 3.0}), Error);
}

TEST(D1, ExactOnQuadraticsIncludingBoundaries) {
  Grid1D g(-2.0, 3.0, 17);
  const RealField1D df = d1(RealField1D::tabulate(g, [](double x) { return x * x; }));
  for (std::size_t j = 0; j < df.size(); ++j) EXPECT_NEAR(df[j], 2.0 * g.x(j), 1e-12);
}

TEST(D1, ConstantGivesZero) {
  Grid1D g(0.0, 1.0, 9);
  const RealField1D df = d1(RealField1D::tabulate(g, [](double) { return 4.25; }));
  for (double v : df.values()) EXPECT_EQ(v, 0.0);
}

TEST(D1, SecondOrderOnSine) {
  Grid1D g(-pi, pi, 65);
  auto f = [](double x) { return std::sin(x); };
  auto df = [](double x) { return std::cos(x); };
  const double e1 = interior_max_error(d1(RealField1D::tabulate(g, f)), df);
  const double e2 = interior_max_error(d1(RealField1D::tabulate(g.refined(), f)), df);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(D2, QuadraticAndLinear) {
  Grid1D g(-1.0, 1.0, 21);
  const RealField1D q = d2(RealField1D::tabulate(g, [](double x) { return x * x; }));
  const RealField1D l = d2(RealField1D::tabulate(g, [](double x) { return 3.0 * x - 1.0; }));
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(q[j], 2.0, 1e-10);
    EXPECT_NEAR(l[j], 0.0, 1e-10);
  }
}

TEST(D2, SecondOrderOnGaussian) {
  Grid1D g(-4.0, 4.0, 81);
  auto f = [](double x) { return std::exp(-x * x); };
  auto d2f = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
  const double e1 = interior_max_error(d2(RealField1D::tabulate(g, f)), d2f);
  const double e2 = interior_max_error(d2(RealField1D::tabulate(g.refined(), f)), d2f);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.05);
  // one-sided boundary stencil is second order too
  auto boundary_error = [&](const Grid1D& gg) {
    const RealField1D r = d2(RealField1D::tabulate(gg, [](double x) { return std::sin(x); }));
    return std::abs(r[0] + std::sin(gg.x(0)));
  };
  Grid1D s(0.3, 1.3, 41);
  EXPECT_GT(std::log2(boundary_error(s) / boundary_error(s.refined())), 1.8);
}

TEST(Decompose, UnitField) {
  Grid1D g(0.0, 1.0, 10);
  const PolarPair p = decompose(ComplexField1D::tabulate(g, [](double) { return complex(1.0, 0.0); }), 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_EQ(p.R[j], 1.0);
    EXPECT_EQ(p.S[j], 0.0);
    EXPECT_FALSE(p.node_mask[j]);
  }
}

TEST(Decompose, PlaneWaveUnwrapsToLinearPhase) {
  const double hbar = 0.7, k = 3.0;
  Grid1D g(-10.0, 10.0, 401);  // |k dx| = 0.15 < pi
  const PolarPair p =
      decompose(ComplexField1D::tabulate(g, [&](double x) { return std::polar(1.0, k * x); }), hbar);
  const double offset = p.S[0] - hbar * k * g.x(0);
  EXPECT_NEAR(std::remainder(offset, 2.0 * pi * hbar), 0.0, 1e-12);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(p.R[j], 1.0, 1e-14);
    EXPECT_NEAR(p.S[j] - hbar * k * g.x(j), offset, 1e-11);
  }
}

TEST(Decompose, UnwrapConsistencyProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Grid1D g(-6.0, 6.0, 301);
  const double hbar = 1.3;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = 4.0 * u(rng), b = 2.0 * u(rng), c = u(rng);
    auto S0 = [&](double x) { return hbar * (a * x + b * std::sin(x) + c * x * x); };
    const PolarPair p =
        decompose(ComplexField1D::tabulate(g, [&](double x) { return std::polar(1.0, S0(x) / hbar); }), hbar);
    const double shift = p.S[0] - S0(g.x(0));
    EXPECT_NEAR(std::remainder(shift, 2.0 * pi * hbar), 0.0, 1e-10);
    for (std::size_t j = 0; j < g.size(); ++j) ASSERT_NEAR(p.S[j] - S0(g.x(j)), shift, 1e-9) << "trial " << trial;
  }
}

TEST(Decompose, RoundTripProperty) {
  std::mt19937_64 rng(11);
  Grid1D g(-5.0, 5.0, 257);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexField1D psi = random_smooth_field(rng, g);
    const ComplexField1D back = recompose(decompose(psi, 0.9), 0.9);
    for (std::size_t j = 0; j < g.size(); ++j) ASSERT_LE(std::abs(back[j] - psi[j]) / std::abs(psi[j]), 1e-12);
  }
}

TEST(Decompose, MasksNodesAndInterpolatesPhase) {
  Grid1D g(0.0, 4.0, 5);
  std::vector<complex> v{std::polar(1.0, 0.1), std::polar(1.0, 0.3), complex(0.0, 0.0), std::polar(1.0, 0.7),
                         std::polar(1.0, 0.9)};
  const PolarPair p = decompose(ComplexField1D(g, v), 1.0);
  EXPECT_TRUE(p.node_mask[2]);
  EXPECT_FALSE(p.node_mask[1]);
  EXPECT_NEAR(p.S[2], 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(p.masked_fraction(), 0.2);
}

TEST(Decompose, AllMaskedField) {
  Grid1D g(0.0, 1.0, 6);
  const PolarPair p = decompose(ComplexField1D(g), 1.0);
  EXPECT_EQ(p.masked_count(), g.size());
  for (double s : p.S.values()) EXPECT_EQ(s, 0.0);
}

TEST(Recompose, Examples) {
  Grid1D g(0.0, 1.0, 4);
  const double hbar = 1.7;
  const ComplexField1D one = recompose(PolarPair{RealField1D::tabulate(g, [](double) { return 1.0; }), RealField1D(g),
                                                 std::vector<bool>(4, false)},
                                       hbar);
  const ComplexField1D minus_two =
      recompose(PolarPair{RealField1D::tabulate(g, [](double) { return 2.0; }),
                          RealField1D::tabulate(g, [&](double) { return pi * hbar; }), std::vector<bool>(4, false)},
                hbar);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(std::abs(one[j] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(minus_two[j] + 2.0), 0.0, 1e-15);
  }
}

TEST(Recompose, DecomposeRecoversActionModuloPeriod) {
  Grid1D g(0.0, 2.0, 21);
  const double hbar = 0.5;
  const RealField1D S = RealField1D::tabulate(g, [&](double x) { return 40.0 + 0.3 * x; });
  const PolarPair pair{RealField1D::tabulate(g, [](double) { return 1.0; }), S, std::vector<bool>(21, false)};
  const PolarPair back = decompose(recompose(pair, hbar), hbar);
  const double shift = back.S[0] - S[0];
  EXPECT_NEAR(std::remainder(shift, 2.0 * pi * hbar), 0.0, 1e-12);
  for (std::size_t j = 0; j < 21; ++j) EXPECT_NEAR(back.S[j] - S[j], shift, 1e-12);
}

TEST(SplitUW, Examples) {
  Grid1D g(0.0, 1.0, 3);
  const double hbar = 2.0;
  auto ones = RealField1D::tabulate(g, [](double) { return 1.0; });
  const UWSplit a = split_uw(PolarPair{ones, RealField1D(g), std::vector<bool>(3, false)}, hbar);
  const UWSplit b = split_uw(
      PolarPair{ones, RealField1D::tabulate(g, [&](double) { return 0.5 * pi * hbar; }), std::vector<bool>(3, false)},
      hbar);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(a.U[j], 1.0);
    EXPECT_EQ(a.W[j], 0.0);
    EXPECT_NEAR(b.U[j], 0.0, 1e-15);
    EXPECT_NEAR(b.W[j], 1.0, 1e-15);
  }
}

TEST(SplitUW, AmplitudeIdentityProperty) {
  std::mt19937_64 rng(3);
  Grid1D g(-5.0, 5.0, 129);
  for (int trial = 0; trial < 30; ++trial) {
    const PolarPair p = decompose(random_smooth_field(rng, g), 1.0);
    const UWSplit s = split_uw(p, 1.0);
    EXPECT_LE(s.amplitude_mismatch, 1e-14);
    EXPECT_LE(s.phase_mismatch, 1e-13);
  }
}

TEST(VectorIdentity, QuadraticHasPureStencilResidual) {
  // Analytic terms for S = x^2: d/dx(S S') = 6x^2, (S')^2 = 4x^2, S S'' = 2x^2.
  for (double x : {-1.5, 0.0, 0.25, 3.0}) EXPECT_EQ(6.0 * x * x - 4.0 * x * x - 2.0 * x * x, 0.0);
  // The only discrete error is the centered difference of the cubic 2x^3,
  // which is 2 dx^2 at every node away from the boundary band.
  Grid1D g(-2.0, 2.0, 41);
  const ResidualReport r = vector_identity_residual(RealField1D::tabulate(g, [](double x) { return x * x; }));
  const RealField1D& field = *r.entries[0].field;
  for (std::size_t j = 2; j + 2 < g.size(); ++j) EXPECT_NEAR(field[j], 2.0 * g.dx() * g.dx(), 1e-11);
}

TEST(VectorIdentity, ConstantIsExact) {
  Grid1D g(0.0, 1.0, 11);
  const ResidualReport r = vector_identity_residual(RealField1D::tabulate(g, [](double) { return -2.5; }));
  EXPECT_EQ(r.entries[0].norms.max, 0.0);
}

TEST(VectorIdentity, SecondOrderOnSine) {
  const ResidualReport r = vector_identity_residual([](double x) { return std::sin(x); }, Grid1D(-pi, pi, 101));
  ASSERT_TRUE(r.entries[0].order.has_value());
  EXPECT_GE(r.entries[0].order->order, 1.9);
}

TEST(FieldCsv, RoundTripIsExact) {
  std::mt19937_64 rng(5);
  Grid1D g(-1.0, 2.0, 33);
  const ComplexField1D psi = random_smooth_field(rng, g);
  std::stringstream ss;
  io::write_csv(ss, psi);
  EXPECT_EQ(ss.str().substr(0, 8), "x,re,im\n");
  const ComplexField1D back = io::read_csv<complex>(ss);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(back[j], psi[j]);

  std::stringstream rs;
  const RealField1D S = RealField1D::tabulate(g, [](double x) { return std::exp(x) / 3.0; });
  io::write_csv(rs, S);
  const RealField1D rb = io::read_csv<double>(rs);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(rb[j], S[j]);
}
