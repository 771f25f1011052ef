#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kpsim/field.hpp"

using namespace kpsim;

namespace {

constexpr double pi = std::numbers::pi;

Field noise(const GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  RealArray v(g->size());
  for (auto& x : v) x = d(rng);
  return Field::from_physical(g, std::move(v));
}

double max_diff(const Field& a, const Field& b) {
  const RealArray p = to_physical(a).physical();
  const RealArray q = to_physical(b).physical();
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m = std::max(m, std::abs(p[n] - q[n]));
  return m;
}

}  // namespace

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(SpectralGrid(1.0, 1.0, 48, 16), ConfigError);
  EXPECT_THROW(SpectralGrid(1.0, 1.0, 1, 16), ConfigError);
  EXPECT_THROW(SpectralGrid(0.0, 1.0, 16, 16), ConfigError);
  EXPECT_THROW(SpectralGrid(1.0, -2.0, 16, 16), ConfigError);
  EXPECT_THROW(SpectralGrid(std::nan(""), 1.0, 16, 16), ConfigError);
  EXPECT_NO_THROW(SpectralGrid(1.0, 1.0, 2, 2));
}

TEST(Grid, NodesAndWavenumbers) {
  SpectralGrid g(2.0, 0.5, 8, 4);
  EXPECT_DOUBLE_EQ(g.x().front(), -2.0 * pi);
  EXPECT_DOUBLE_EQ(g.dx(), 4.0 * pi / 8.0);
  EXPECT_DOUBLE_EQ(g.y()[2], 0.0);
  const std::vector<double> xi1{0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(g.xi1()[i], xi1[i]);
  EXPECT_DOUBLE_EQ(g.xi2_half(1), 2.0);
  EXPECT_DOUBLE_EQ(g.xi2_half(2), -4.0);  // Nyquist carries -ny/2
  EXPECT_EQ(g.nky(), 3u);
  EXPECT_TRUE(g.x_nyquist(4));
  EXPECT_TRUE(g.y_nyquist(2));
  EXPECT_DOUBLE_EQ(g.area(), 4.0 * pi * pi);
}

// naive O(N^2) DFT with the 1/N normalization
TEST(Transform, MatchesDirectDft8x8) {
  auto g = make_grid(1.0, 1.0, 8, 8);
  const Field u = noise(g, 7);
  const auto fast = full_spectrum(u);
  const auto& v = u.physical();
  for (int j = 0; j < 8; ++j)
    for (int k = 0; k < 8; ++k) {
      complex s = 0.0;
      for (int n = 0; n < 8; ++n)
        for (int m = 0; m < 8; ++m) s += v[n * 8 + m] * std::polar(1.0, -2.0 * pi * (j * n + k * m) / 8.0);
      s /= 64.0;
      EXPECT_NEAR(std::abs(fast[j * 8 + k] - s), 0.0, 1e-14) << j << "," << k;
    }
}

TEST(Transform, RoundTripIsIdentityToRounding) {
  for (auto [nx, ny] : {std::pair<std::size_t, std::size_t>{16, 16}, {64, 8}, {8, 128}, {2, 2}}) {
    auto g = make_grid(1.3, 0.7, nx, ny);
    const Field u = noise(g, static_cast<unsigned>(nx * 31 + ny));
    const Field back = to_physical(Field::from_spectral(g, to_spectral(u).spectral()));
    EXPECT_LT(max_diff(u, back), 1e-13);
  }
}

TEST(Transform, ConstantMapsToMeanMode) {
  auto g = make_grid(1.0, 1.0, 16, 8);
  const Field c = to_spectral(Field::from_function(g, [](double, double) { return 2.5; }));
  EXPECT_NEAR(c.spectral()[0].real(), 2.5, 1e-15);
  for (std::size_t n = 1; n < c.spectral().size(); ++n) EXPECT_LT(std::abs(c.spectral()[n]), 1e-15);
}

TEST(Transform, ParsevalOnRandomFields) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> e(1, 7);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = make_grid(0.5 + trial * 0.1, 2.0, std::size_t{1} << e(rng), std::size_t{1} << e(rng));
    const Field u = noise(g, rng());
    const Field s = Field::from_spectral(g, to_spectral(u).spectral());
    EXPECT_NEAR(l2_squared(s) / l2_squared(u), 1.0, 1e-12);
  }
}

TEST(Transform, FullSpectrumIsHermitian) {
  auto g = make_grid(1.0, 1.0, 16, 8);
  const auto f = full_spectrum(noise(g, 3));
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      EXPECT_LT(std::abs(f[i * 8 + j] - std::conj(f[((16 - i) % 16) * 8 + (8 - j) % 8])), 1e-15);
}

TEST(Transform, PlansAreCachedPerShape) {
  EXPECT_EQ(transform_for(32, 16).get(), transform_for(32, 16).get());
  EXPECT_NE(transform_for(32, 16).get(), transform_for(16, 32).get());
}

TEST(Transform, NonFiniteInputIsReported) {
  auto g = make_grid(1.0, 1.0, 8, 8);
  RealArray v(g->size(), 0.0);
  v[5] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(to_spectral(Field::from_physical(g, v)), NumericalOverflow);
}

TEST(Derivative, ExactOnTrigonometricPolynomials) {
  auto g = make_grid(1.5, 0.8, 64, 32);
  const double a = 3.0 / 1.5, b = 2.0 / 0.8;
  const Field u = Field::from_function(g, [&](double x, double y) { return std::sin(a * x) * std::cos(b * y); });
  const Field ux = apply_multiplier(u, dx_multiplier(*g, 1));
  const Field uyy = apply_multiplier(u, dy_multiplier(*g, 2));
  const Field ex = Field::from_function(g, [&](double x, double y) { return a * std::cos(a * x) * std::cos(b * y); });
  const Field eyy = Field::from_function(g, [&](double x, double y) { return -b * b * std::sin(a * x) * std::cos(b * y); });
  EXPECT_LT(max_diff(ux, ex), 1e-12);
  EXPECT_LT(max_diff(uyy, eyy), 1e-11);
}

TEST(Derivative, SpectralAccuracyOnGaussian) {
  auto g = make_grid(1.0, 1.0, 64, 64);
  const Field u = Field::from_function(g, [](double x, double y) { return std::exp(-4 * (x * x + y * y)); });
  const Field uy = apply_multiplier(u, dy_multiplier(*g, 1));
  const Field e = Field::from_function(g, [](double x, double y) { return -8 * y * std::exp(-4 * (x * x + y * y)); });
  EXPECT_LT(max_diff(uy, e), 1e-10);
}

TEST(Derivative, OddOrdersVanishOnNyquist) {
  SpectralGrid g(1.0, 1.0, 8, 8);
  const auto dx = dx_multiplier(g, 1), dy = dy_multiplier(g, 3), dxx = dx_multiplier(g, 2);
  for (std::size_t k = 0; k < g.nky(); ++k) {
    EXPECT_EQ(dx[4 * g.nky() + k], complex(0.0));
    EXPECT_NE(dxx[4 * g.nky() + k], complex(0.0));
  }
  for (std::size_t i = 0; i < g.nx(); ++i) EXPECT_EQ(dy[i * g.nky() + 4], complex(0.0));
}

TEST(Derivative, CompositionAwayFromNyquist) {
  SpectralGrid g(2.0, 1.0, 16, 16);
  const auto d1 = dx_multiplier(g, 1), d2 = dx_multiplier(g, 2);
  const auto dd = d1 * d1;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    if (g.x_nyquist(i)) continue;
    for (std::size_t k = 0; k < g.nky(); ++k) EXPECT_LT(std::abs(dd[i * g.nky() + k] - d2[i * g.nky() + k]), 1e-13);
  }
}

TEST(Multiplier, ShapeChecks) {
  SpectralGrid g(1.0, 1.0, 8, 8);
  std::vector<complex> wrong(8 * 4);
  EXPECT_THROW(Multiplier::from_full(g, wrong), ConfigError);
  std::vector<complex> ones(64, 1.0);
  const Multiplier m = Multiplier::from_full(g, ones);
  auto other = make_grid(1.0, 1.0, 16, 8);
  EXPECT_THROW(apply_multiplier(Field(other), m), ConfigError);
  EXPECT_THROW(m * dx_multiplier(*other), ConfigError);
}

TEST(Multiplier, IdentityLeavesFieldUnchanged) {
  auto g = make_grid(1.0, 1.0, 16, 16);
  const Field u = noise(g, 11);
  std::vector<complex> ones(g->size(), 1.0);
  EXPECT_LT(max_diff(apply_multiplier(u, Multiplier::from_full(*g, ones)), u), 1e-13);
}

TEST(Field, RepresentationsAndArithmetic) {
  auto g = make_grid(1.0, 1.0, 8, 8);
  Field a = Field::from_function(g, [](double x, double) { return x; });
  EXPECT_EQ(a.representation(), Representation::physical);
  EXPECT_THROW((void)a.spectral(), std::logic_error);
  const Field s = to_spectral(a);
  EXPECT_EQ(s.representation(), Representation::both);
  const Field only = Field::from_spectral(g, s.spectral());
  EXPECT_THROW((void)only.physical(), std::logic_error);
  const Field sum = a + 2.0 * a;
  EXPECT_DOUBLE_EQ(sum.at(3, 1), 3.0 * a.at(3, 1));
  EXPECT_DOUBLE_EQ((-a).at(2, 0), -a.at(2, 0));
  EXPECT_THROW(a += Field(make_grid(1.0, 1.0, 16, 8)), ConfigError);
  EXPECT_THROW(Field::from_physical(g, RealArray(3)), ConfigError);
}

TEST(Norms, L2AndMax) {
  auto g = make_grid(1.0, 1.0, 32, 32);
  const Field u = Field::from_function(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
  // integral of sin^2 x sin^2 y over [-pi, pi)^2 is pi^2
  EXPECT_NEAR(l2_squared(u), pi * pi, 1e-12);
  EXPECT_NEAR(l2_squared(Field::from_spectral(g, to_spectral(u).spectral())), pi * pi, 1e-12);
  EXPECT_NEAR(max_abs(u), 1.0, 1e-2);
}
