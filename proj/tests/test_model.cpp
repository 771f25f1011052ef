#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kpsim/model.hpp"
#include "kpsim/solutions.hpp"

using namespace kpsim;

namespace {

double max_diff(const Field& a, const Field& b) {
  const RealArray p = to_physical(a).physical();
  const RealArray q = to_physical(b).physical();
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m = std::max(m, std::abs(p[n] - q[n]));
  return m;
}

KPParams with(Rational p, int eps) {
  KPParams k;
  k.p = p;
  k.epsilon = eps;
  return k;
}

}  // namespace

TEST(Rational, ParseAndReduce) {
  EXPECT_EQ(Rational::parse("4/3"), (Rational{4, 3}));
  EXPECT_EQ(Rational::parse("6/3"), (Rational{2, 1}));
  EXPECT_EQ(Rational::parse("2"), (Rational{2, 1}));
  EXPECT_EQ(Rational::parse("4/3").str(), "4/3");
  EXPECT_EQ((Rational{4, 3} + 1), (Rational{7, 3}));
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
  EXPECT_THROW(Rational::parse("x"), ConfigError);
  EXPECT_THROW(Rational::parse("3/"), ConfigError);
}

TEST(Params, Validation) {
  EXPECT_NO_THROW(with({4, 3}, -1).validate());
  EXPECT_THROW(with({1, 2}, 1).validate(), ConfigError);
  EXPECT_THROW(with({1, 1}, 0).validate(), ConfigError);
  EXPECT_THROW(with({-1, 1}, 1).validate(), ConfigError);
  KPParams k;
  k.zero_mode = ZeroModePolicy::tiny_shift(1e-3);
  EXPECT_THROW(k.validate(), ConfigError);
  k.zero_mode = ZeroModePolicy::tiny_shift(1e-16);
  EXPECT_NO_THROW(k.validate());
}

TEST(SignedPow, OddDenominatorsStayReal) {
  EXPECT_DOUBLE_EQ(signed_pow(-2.0, {3, 1}), -8.0);
  EXPECT_DOUBLE_EQ(signed_pow(-2.0, {2, 1}), 4.0);
  EXPECT_NEAR(signed_pow(-8.0, {4, 3}), 16.0, 1e-12);
  EXPECT_NEAR(signed_pow(-8.0, {7, 3}), -128.0, 1e-10);
  EXPECT_NEAR(signed_pow(8.0, {7, 3}), 128.0, 1e-10);
  EXPECT_EQ(signed_pow(0.0, {7, 3}), 0.0);
}

TEST(LinearSymbol, ValuesAndSkewness) {
  SpectralGrid g(1.0, 1.0, 8, 8);
  const std::size_t nky = g.nky();
  // xi1 = 2 (i = 2), xi2 = 3 (k = 3)
  EXPECT_NEAR(std::abs(linear_symbol(g, with({1, 1}, 1))[2 * nky + 3] - complex(0.0, 8.0 - 4.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(linear_symbol(g, with({1, 1}, -1))[2 * nky + 3] - complex(0.0, 8.0 + 4.5)), 0.0, 1e-14);
  for (int eps : {1, -1}) {
    const auto L = linear_symbol(g, with({1, 1}, eps));
    for (std::size_t n = 0; n < L.values().size(); ++n) EXPECT_EQ(L[n].real(), 0.0);
    for (std::size_t k = 0; k < nky; ++k) {
      EXPECT_EQ(L[k], complex(0.0));            // xi1 = 0 column under project
      EXPECT_EQ(L[4 * nky + k], complex(0.0));  // x-Nyquist row
    }
  }
}

TEST(LinearSymbol, TinyShiftIsDissipativeAndFinite) {
  SpectralGrid g(1.0, 1.0, 16, 16);
  for (int eps : {1, -1}) {
    KPParams k = with({1, 1}, eps);
    k.zero_mode = ZeroModePolicy::tiny_shift(1e-16);
    const auto L = linear_symbol(g, k);
    for (std::size_t n = 0; n < L.values().size(); ++n) {
      EXPECT_TRUE(std::isfinite(L[n].real()) && std::isfinite(L[n].imag()));
      EXPECT_LE(L[n].real(), 0.0);
    }
    // away from xi1 = 0 the shift is invisible
    EXPECT_NEAR(std::abs(L[3 * g.nky() + 2] - linear_symbol(g, with({1, 1}, eps))[3 * g.nky() + 2]), 0.0, 1e-12);
  }
}

// a plane wave cos(a x + b y + w t) solves the linear equation when
// w = a^3 - eps b^2 / a
TEST(LinearPropagate, PlaneWaveOracle) {
  auto g = make_grid(2.0, 1.5, 32, 16);
  const double a = 3.0 / 2.0, b = -2.0 / 1.5, t = 0.37;
  for (int eps : {1, -1}) {
    const double w = a * a * a - eps * b * b / a;
    const Field u0 = Field::from_function(g, [&](double x, double y) { return std::cos(a * x + b * y); });
    const Field exact = Field::from_function(g, [&](double x, double y) { return std::cos(a * x + b * y + w * t); });
    EXPECT_LT(max_diff(linear_propagate(u0, t, with({1, 1}, eps)), exact), 1e-12);
  }
}

TEST(LinearPropagate, GroupProperty) {
  auto g = make_grid(1.0, 1.0, 32, 32);
  const Field u0 = project_constraint(
      Field::from_function(g, [](double x, double y) { return std::exp(-std::cos(x) - 2 * std::sin(y) * std::sin(x)); }));
  const auto k = with({1, 1}, -1);
  EXPECT_LT(max_diff(linear_propagate(linear_propagate(u0, 0.3, k), 0.4, k), linear_propagate(u0, 0.7, k)), 1e-12);
}

// N(u) = -u^p u_x, checked against the closed form
TEST(Nonlinear, CubicTermMatchesClosedForm) {
  auto g = make_grid(1.0, 1.0, 64, 8);
  const Field u = Field::from_function(g, [](double x, double) { return std::sin(x); });
  const Field n = nonlinear_rhs(u, with({2, 1}, -1));
  const Field e = Field::from_function(g, [](double x, double) { return -std::sin(x) * std::sin(x) * std::cos(x); });
  EXPECT_LT(max_diff(n, e), 1e-13);
}

TEST(Nonlinear, FractionalPowerMatchesClosedForm) {
  auto g = make_grid(1.0, 1.0, 128, 4);
  for (double s : {1.0, -1.0}) {
    const Field u = Field::from_function(g, [&](double x, double) { return s * (2.0 + std::cos(x)); });
    const Field n = nonlinear_rhs(u, with({4, 3}, -1));
    const Field e = Field::from_function(g, [&](double x, double) {
      const double v = s * (2.0 + std::cos(x));
      return -std::pow(std::abs(v), 4.0 / 3.0) * (-s * std::sin(x));
    });
    EXPECT_LT(max_diff(n, e), 1e-10);
  }
}

TEST(Nonlinear, QuadraticTermMatchesFiniteDifference) {
  // fourth-order central differences of -(u^2/2)_x on a fine grid
  auto g = make_grid(1.0, 1.0, 256, 4);
  auto f = [](double x) { return std::exp(std::sin(x)); };
  const Field n = to_physical(nonlinear_rhs(Field::from_function(g, [&](double x, double) { return f(x); }), {}));
  const double h = 1e-3;
  for (std::size_t i = 0; i < g->nx(); i += 17) {
    const double x = g->x()[i];
    auto w = [&](double s) { return 0.5 * f(s) * f(s); };
    const double d = (-w(x + 2 * h) + 8 * w(x + h) - 8 * w(x - h) + w(x - 2 * h)) / (12 * h);
    EXPECT_NEAR(n.at(i, 0), -d, 1e-9);
  }
}

TEST(Nonlinear, ParityInU) {
  std::mt19937 rng(5);
  std::normal_distribution<double> d;
  auto g = make_grid(1.0, 1.0, 16, 16);
  RealArray v(g->size());
  for (auto& x : v) x = d(rng);
  const Field u = Field::from_physical(g, v);
  for (auto [p, odd] : {std::pair{Rational{2, 1}, true}, {Rational{4, 3}, true}, {Rational{1, 1}, false}}) {
    const Field a = to_physical(nonlinear_rhs(u, with(p, 1)));
    const Field b = to_physical(nonlinear_rhs(-u, with(p, 1)));
    const Field expect = odd ? -a : a;
    EXPECT_LT(max_diff(b, expect), 1e-12) << p.str();
  }
}

TEST(Nonlinear, DisabledAndDealiased) {
  auto g = make_grid(1.0, 1.0, 32, 8);
  const Field u = Field::from_function(g, [](double x, double) { return std::cos(x); });
  KPParams off;
  off.nonlinear = false;
  EXPECT_EQ(max_abs(nonlinear_rhs(u, off)), 0.0);
  KPParams d;
  d.dealias = true;
  // cos^2 is resolved by the 2/3 rule, so both agree
  EXPECT_LT(max_diff(nonlinear_rhs(u, d), nonlinear_rhs(u, {})), 1e-14);
  const auto mask = dealias_mask(*g);
  EXPECT_EQ(mask[0], 1);
  EXPECT_EQ(mask[16 * g->nky()], 0);
}

TEST(Nonlinear, OverflowIsReported) {
  auto g = make_grid(1.0, 1.0, 8, 8);
  const Field u = Field::from_function(g, [](double x, double) { return 1e200 * (1.0 + std::cos(x)); });
  EXPECT_THROW(nonlinear_rhs(u, with({2, 1}, 1)), NumericalOverflow);
}

TEST(Constraint, ProjectionZeroesTransverseMeanKeepsGlobalMean) {
  auto g = make_grid(1.0, 1.0, 16, 16);
  const Field u = Field::from_function(g, [](double x, double y) { return 0.7 + std::cos(y) + std::sin(x + y); });
  EXPECT_GT(constraint_violation(*g, to_spectral(u).spectral()), 0.1);
  const Field p = project_constraint(u);
  EXPECT_EQ(constraint_violation(*g, p.spectral()), 0.0);
  EXPECT_NEAR(p.spectral()[0].real(), 0.7, 1e-15);
  const Field e = Field::from_function(g, [](double x, double y) { return 0.7 + std::sin(x + y); });
  EXPECT_LT(max_diff(p, e), 1e-14);
  const Field pp = project_constraint(p);
  EXPECT_EQ(pp.spectral(), p.spectral());
}

TEST(InverseDx, InvertsDerivativeOffAxis) {
  auto g = make_grid(1.0, 1.0, 32, 16);
  const Field u = Field::from_function(g, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
  const Field back = apply_multiplier(apply_multiplier(u, dx_multiplier(*g, 1)), inverse_dx_multiplier(*g, {}));
  EXPECT_LT(max_diff(back, u), 1e-14);
}

TEST(SolitaryResidual, ExactProfilesAndWrongSpeed) {
  const KPParams kp1 = with({1, 1}, -1);
  const Field k = a_sech2(make_grid(16, 1, 512, 4), 3.0, 1.0, 0.0);
  EXPECT_LT(sw_residual(k, 1.0, kp1) / l2_norm(k), 1e-10);
  EXPECT_GT(sw_residual(k, 1.2, kp1) / l2_norm(k), 1e-2);
  const Field l = lump(make_grid(40, 40, 1024, 1024), 1.0, 0.0, 0.0);
  EXPECT_LT(sw_residual(l, 1.0, kp1) / l2_norm(l), 1e-2);
}
