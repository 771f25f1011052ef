#include <gtest/gtest.h>

#include <cmath>

#include "kpsim/diagnostics.hpp"
#include "kpsim/solutions.hpp"

using namespace kpsim;

namespace {
// closed form found symbolically from the travelling-wave equation
double zaitsev_delta_oracle(double alpha, double beta) { return std::sqrt(3.0) * alpha * alpha / std::sqrt(1.0 - beta * beta); }
}  // namespace

TEST(Soliton, PointValues) {
  auto g = make_grid(8, 1, 256, 4);
  const Field k = kdv_soliton(g, 1.0, 0.0);
  const double x = 2.0;
  EXPECT_NEAR(1.5 * detail::sech2(x / 2.0), 0.6299615124210392, 1e-15);
  const Field shifted = Field::from_function(g, [](double, double) { return 0.0; }) + kdv_soliton(g, 1.0, -2.0);
  // node x = 0 exists (index nx / 2), at distance 2 from the crest
  EXPECT_NEAR(shifted.at(128, 0), 0.6299615124210392, 1e-14);
  EXPECT_NEAR(max_abs(k), 1.5, 1e-15);
  EXPECT_NEAR(max_abs(a_sech2(g, 12.0, 4.0, 0.0)), 12.0, 1e-14);
  EXPECT_THROW(a_sech2(g, 1.0, -1.0, 0.0), ConfigError);
}

TEST(Soliton, ConstantInY) {
  auto g = make_grid(4, 1, 64, 8);
  const Field k = kdv_soliton(g, 2.0, 1.0);
  for (std::size_t i = 0; i < 64; i += 7)
    for (std::size_t j = 1; j < 8; ++j) EXPECT_EQ(k.at(i, j), k.at(i, 0));
}

TEST(Lump, ShapeAndDecay) {
  EXPECT_DOUBLE_EQ(lump_value(1.5, 0.0, 0.0), 12.0);
  // zero on the curve c x^2 / 3 = 1 + c^2 y^2 / 3
  EXPECT_NEAR(lump_value(1.0, std::sqrt(3.0), 0.0), 0.0, 1e-15);
  EXPECT_LT(lump_value(1.0, 3.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(lump_value(1.0, 2.0, 1.0), lump_value(1.0, -2.0, -1.0));
  EXPECT_LT(std::abs(lump_value(1.0, 100.0, 0.0)), 1e-2);
}

TEST(Lump, SmallDomainWarns) {
  warnings_enabled() = true;
  testing::internal::CaptureStderr();
  (void)lump(make_grid(1, 1, 32, 32), 1.0, 0.0, 0.0);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("warning"), std::string::npos);
  testing::internal::CaptureStderr();
  (void)lump(make_grid(20, 20, 32, 32), 1.0, 0.0, 0.0);
  EXPECT_EQ(testing::internal::GetCapturedStderr(), "");
}

TEST(Zaitsev, SpeedAndProfile) {
  EXPECT_DOUBLE_EQ(zaitsev_speed(1.0, 0.5), 5.0);
  EXPECT_DOUBLE_EQ(zaitsev_speed(2.0, 0.0), 16.0);
  // beta = 0 is the line soliton 12 alpha^2 sech^2(alpha x) with speed 4 alpha^2
  EXPECT_NEAR(zaitsev_value(1.0, 0.0, 0.0, 0.3, 1.0), 12.0 * detail::sech2(0.3), 1e-14);
  // peak at x = 0, y = 0: 12 alpha^2 (1 - beta) / (1 - beta)^2
  EXPECT_NEAR(zaitsev_value(1.0, 0.5, 2.0, 0.0, 0.0), 24.0, 1e-14);
}

TEST(Zaitsev, TransverseWavenumberMatchesClosedForm) {
  EXPECT_NEAR(zaitsev_transverse_wavenumber(1.0, 0.5), 2.0, 1e-6);
  EXPECT_NEAR(zaitsev_transverse_wavenumber(0.8, 0.3), zaitsev_delta_oracle(0.8, 0.3), 1e-6);
  EXPECT_EQ(zaitsev_transverse_wavenumber(1.0, 0.0), 0.0);
  EXPECT_THROW(zaitsev_transverse_wavenumber(1.0, 1.0), ConfigError);
  EXPECT_THROW(zaitsev_transverse_wavenumber(-1.0, 0.5), ConfigError);
}

TEST(Zaitsev, ResidualSmallOnPeriodicGrid) {
  const double d = zaitsev_transverse_wavenumber(1.0, 0.5);
  auto g = make_grid(10, 5.0 / d, 1024, 256);
  const auto z = zaitsev(g, 1.0, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(z.speed, 5.0);
  KPParams k;
  k.epsilon = -1;
  EXPECT_LT(sw_residual(z.field, z.speed, k) / l2_norm(z.field), 1e-6);
}

TEST(Zaitsev, NonPeriodicDomainWarns) {
  warnings_enabled() = true;
  testing::internal::CaptureStderr();
  // delta = 2, so 2 pi Ly delta = 1.4 pi is not a multiple of 2 pi
  (void)zaitsev(make_grid(10, 0.7, 64, 16), 1.0, 0.5, 0.0);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("not periodic"), std::string::npos);
}

TEST(InitialData, GaussianSecondDerivative) {
  auto g = make_grid(5, 2, 256, 128);
  const Field u = gaussian_dxx(g, 1.0, 6.0);
  EXPECT_NEAR(u.at(128, 64), -12.0, 1e-13);  // -2 alpha A at the origin
  EXPECT_NEAR(max_abs(gaussian_dxx(g, 4.0, 6.0)), 48.0, 1e-12);
  EXPECT_THROW(gaussian_dxx(g, 0.0, 1.0), ConfigError);
  // the data already satisfy the constraint: x-averages vanish
  EXPECT_LT(constraint_violation(*g, to_spectral(u).spectral()), 1e-14);
}

TEST(InitialData, PerturbationPairIsOddAboutX1) {
  auto g = make_grid(8, 8, 128, 64);
  const Field p = perturbation_pair(g, 0.0, 1);
  const Field m = perturbation_pair(g, 0.0, -1);
  for (std::size_t i = 1; i < 64; i += 5)
    for (std::size_t j = 0; j < 64; j += 9) {
      EXPECT_NEAR(p.at(64 + i, j), -p.at(64 - i, j), 1e-13);
      EXPECT_EQ(m.at(64 + i, j), -p.at(64 + i, j));
    }
}

TEST(InitialData, DeformedSolitonCrestFollowsCosine) {
  auto g = make_grid(16, 8, 256, 32);
  const Field f = deformed_soliton(g);
  EXPECT_NEAR(max_abs(f), 12.0, 0.05);
  // at y = 0 the crest sits at x = -0.4
  EXPECT_NEAR(deformed_soliton(g, 12.0, 0.4, 0.0).at(128, 16), 12.0 * detail::sech2(0.4), 1e-13);
}
