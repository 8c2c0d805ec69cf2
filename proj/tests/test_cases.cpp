#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "amrd/cases.hpp"
#include "amrd/diagnostics.hpp"

using namespace amrd;

TEST(Vortex, CentreAndFarField) {
  const VortexParams vp{5.0, 1.4, {0, 0}, {1, 0}};
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rho_c = std::pow(1.0 - 0.4 * 25.0 / (8.0 * 1.4 * pi2) * std::numbers::e, 1.0 / 0.4);
  const Primitive c = isentropic_vortex({0, 0}, vp);
  EXPECT_NEAR(c.rho, rho_c, 1e-14);
  EXPECT_NEAR(c.p, std::pow(rho_c, 1.4), 1e-14);
  EXPECT_NEAR(c.v.x, 1.0, 1e-15);
  const Primitive far = isentropic_vortex({9.5, -9.5}, vp);
  EXPECT_NEAR(far.rho, 1.0, 1e-12);
  EXPECT_NEAR(far.v.x, 1.0, 1e-12);
  EXPECT_NEAR(far.v.y, 0.0, 1e-12);
  // counter-clockwise perturbation
  EXPECT_GT(isentropic_vortex({1, 0}, vp).v.y, 0.0);
  EXPECT_THROW(isentropic_vortex({0, 0}, VortexParams{20.0}), ConfigError);
}

TEST(Vortex, ExactSolutionIsPeriodic) {
  const VortexParams vp{5.0};
  for (const Vec2 x : {Vec2{0.3, -1.2}, Vec2{9.9, 9.9}, Vec2{-4, 2}}) {
    const Primitive a = vortex_exact(x, 0.0, vp, {20, 20});
    const Primitive b = vortex_exact(x, 20.0, vp, {20, 20});
    const Primitive c = vortex_exact(x + Vec2{1.5, 0}, 1.5, vp, {20, 20});
    EXPECT_NEAR(a.rho, b.rho, 1e-13);
    EXPECT_NEAR(a.rho, c.rho, 1e-13);
    EXPECT_NEAR(a.v.y, c.v.y, 1e-13);
  }
}

TEST(FourVortex, MirrorSymmetry) {
  for (const Vec2 x : {Vec2{2.0, 3.1}, Vec2{0.4, 7.0}, Vec2{3.3, 2.5}}) {
    const Primitive a = four_vortex(x, 5.0);
    const Primitive b = four_vortex({-x.x, x.y}, 5.0);
    const Primitive c = four_vortex({x.x, -x.y}, 5.0);
    EXPECT_NEAR(a.rho, b.rho, 1e-14);
    EXPECT_NEAR(a.rho, c.rho, 1e-14);
    EXPECT_NEAR(a.v.x, -b.v.x, 1e-14);
    EXPECT_NEAR(a.v.y, b.v.y, 1e-14);
    EXPECT_NEAR(a.v.x, c.v.x, 1e-14);
    EXPECT_NEAR(a.v.y, -c.v.y, 1e-14);
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(four_vortex({2.5, 2.5}, 5.0).rho,
              std::pow(1.0 - 0.4 * 25.0 / (8.0 * 1.4 * pi2) * std::numbers::e, 1.0 / 0.4), 1e-14);
  EXPECT_THROW(four_vortex({0, 0}, 30.0), ConfigError);
}

TEST(Gresho, ContinuityAndBalance) {
  for (double r : {0.2, 0.4}) {
    EXPECT_NEAR(gresho_vphi(r - 1e-12), gresho_vphi(r + 1e-12), 1e-10);
    EXPECT_NEAR(gresho_pressure(r - 1e-12), gresho_pressure(r + 1e-12), 1e-10);
  }
  EXPECT_DOUBLE_EQ(gresho_vphi(0.2), 1.0);
  EXPECT_DOUBLE_EQ(gresho_pressure(0.0), 5.0);
  EXPECT_NEAR(gresho_pressure(1.0), 3.0 + 4.0 * std::log(2.0), 1e-15);
  // dp/dr = v^2 / r with rho = 1
  for (double r : {0.05, 0.15, 0.25, 0.35, 0.6}) {
    const double h = 1e-6;
    const double dp = (gresho_pressure(r + h) - gresho_pressure(r - h)) / (2 * h);
    EXPECT_NEAR(dp, gresho_vphi(r) * gresho_vphi(r) / r, 1e-7);
    EXPECT_NEAR(gresho_J(r), r * gresho_vphi(r), 1e-15);
  }
  const Primitive g = gresho({0.1, 0.0});
  EXPECT_NEAR(g.v.x, 0.0, 1e-15);
  EXPECT_NEAR(g.v.y, 0.5, 1e-15);
  EXPECT_EQ(gresho({0, 0}).v.x, 0.0);
}

TEST(Sod, States) {
  const Primitive in = sod2d({0.3, 0.3}), out = sod2d({0.4, 0.4});
  EXPECT_EQ(in.rho, 1.0);
  EXPECT_EQ(in.p, 1.0);
  EXPECT_EQ(out.rho, 0.125);
  EXPECT_EQ(out.p, 0.1);
  EXPECT_EQ(sod2d({0.5, 0.0}).rho, 1.0);
}

TEST(Projection, B2ReproducesQuadraticDensity) {
  const Gas gas{1.4};
  auto f = [](const Vec2& x) { return Primitive{1.0 + 0.1 * x.x * x.x + 0.05 * x.x * x.y, {}, 1.0}; };
  const FESpace sp = make_space(structured_triangles(4, 4, -1, 1, -1, 1), 2);
  const auto u = project_initial(sp, f, gas, true);
  const auto err = error_norms(sp, u, [&](const Vec2& x) { return to_conservative(f(x), gas); });
  EXPECT_LT(err.linf[0], 1e-14);
  const auto pv = project_initial(sp, f, gas, false);
  const auto e2 = error_norms(sp, pv, [&](const Vec2& x) { return to_conservative(f(x), gas); });
  EXPECT_GT(e2.linf[0], 1e-4);
}
