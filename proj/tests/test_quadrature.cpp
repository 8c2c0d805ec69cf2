#include <gtest/gtest.h>

#include <cmath>

#include "amrd/quadrature.hpp"

using namespace amrd;

namespace {
// int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double tri_monomial(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}
}  // namespace

TEST(Quadrature, GaussLegendreExactness) {
  for (int n = 1; n <= 5; ++n) {
    const auto r = quadrature::gauss_legendre(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i], p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-15) << "n=" << n << " p=" << p;
    }
  }
}

TEST(Quadrature, TriangleExactness) {
  for (int deg : {1, 2, 4, 6}) {
    const auto r = quadrature::triangle(deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q)
          s += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
        EXPECT_NEAR(s, tri_monomial(a, b), 1e-14) << "deg=" << deg << " a=" << a << " b=" << b;
      }
  }
  EXPECT_THROW(quadrature::triangle(7), std::invalid_argument);
}

TEST(Quadrature, SquareExactness) {
  const auto r = quadrature::square(3);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q)
        s += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
      EXPECT_NEAR(s, 1.0 / ((a + 1) * (b + 1)), 1e-15);
    }
}
