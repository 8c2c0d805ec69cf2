#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "amrd/core.hpp"

namespace amrd::quadrature {

/// Quadrature rule on a reference domain. Points are reference coordinates
/// (xi, eta); weights sum to the reference measure.
struct Rule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule on [0, 1] (points and weights sum to 1).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

inline LineRule gauss_legendre(int n) {
  // Abscissae/weights on [-1, 1].
  std::vector<double> x;
  std::vector<double> w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2:
      x = {-0.57735026918962576451, 0.57735026918962576451};
      w = {1.0, 1.0};
      break;
    case 3:
      x = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
      w = {0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556};
      break;
    case 4:
      x = {-0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480,
           0.86113631159405257522};
      w = {0.34785484513745385737, 0.65214515486254614263, 0.65214515486254614263,
           0.34785484513745385737};
      break;
    case 5:
      x = {-0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104,
           0.90617984593866399280};
      w = {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
           0.47862867049936646804, 0.23692688505618908751};
      break;
    default:
      throw std::invalid_argument("gauss_legendre: supported point counts are 1..5");
  }
  LineRule r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.points.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

namespace detail {

inline void add_s3(Rule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

// orbit of (a, b, b) in barycentric coordinates; xi = lambda2, eta = lambda3
inline void add_s21(Rule& r, double w, double a, double b) {
  const std::array<std::array<double, 3>, 3> perms{{{a, b, b}, {b, a, b}, {b, b, a}}};
  for (const auto& p : perms) {
    r.points.push_back({p[1], p[2]});
    r.weights.push_back(w);
  }
}

inline void add_s111(Rule& r, double w, double a, double b, double c) {
  const std::array<std::array<double, 3>, 6> perms{
      {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    r.points.push_back({p[1], p[2]});
    r.weights.push_back(w);
  }
}

}  // namespace detail

/// Symmetric triangle rules on the reference triangle (0,0),(1,0),(0,1);
/// weights sum to 1/2. Supported exactness degrees: 1, 2, 4 (6 points),
/// 6 (12 points).
inline Rule triangle(int degree) {
  Rule r;
  if (degree <= 1) {
    detail::add_s3(r, 1.0);
  } else if (degree == 2) {
    detail::add_s21(r, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0);
  } else if (degree <= 4) {
    detail::add_s21(r, 0.223381589678011, 0.108103018168070, 0.445948490915965);
    detail::add_s21(r, 0.109951743655322, 0.816847572980459, 0.091576213509771);
  } else if (degree <= 6) {
    detail::add_s21(r, 0.116786275726379, 0.501426509658179, 0.249286745170910);
    detail::add_s21(r, 0.050844906370207, 0.873821971016996, 0.063089014491502);
    detail::add_s111(r, 0.082851075618374, 0.053145049844817, 0.310352451033784,
                     0.636502499121399);
  } else {
    throw std::invalid_argument("triangle quadrature: degree > 6 not tabulated");
  }
  // tabulated weights carry 15 digits; renormalise so they sum to exactly 1/2
  double total = 0.0;
  for (double w : r.weights) total += w;
  for (auto& w : r.weights) w *= 0.5 / total;
  return r;
}

/// Tensor Gauss rule on the unit square, n points per direction.
inline Rule square(int n) {
  const LineRule g = gauss_legendre(n);
  Rule r;
  for (std::size_t j = 0; j < g.size(); ++j)
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.points.push_back({g.points[i], g.points[j]});
      r.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return r;
}

}  // namespace amrd::quadrature
