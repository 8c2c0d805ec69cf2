#pragma once

// Bernstein-Bezier bases on triangles (any degree) and the bilinear Q1 basis
// on quadrilaterals, together with the integrals and first moments the
// angular-momentum correction needs.

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrd/core.hpp"
#include "amrd/quadrature.hpp"

namespace amrd {

enum class ElementKind { triangle, quadrilateral };

inline int vertex_count(ElementKind kind) { return kind == ElementKind::triangle ? 3 : 4; }

inline std::string to_string(ElementKind kind) {
  return kind == ElementKind::triangle ? "triangle" : "quadrilateral";
}

/// Bezier multi-index (k1, ..., k_{len}). Triangles use three components that
/// sum to the degree; Q1 quadrilaterals use four components, one of them 1.
struct MultiIndex {
  std::array<int, 4> k{};
  int len = 3;

  int degree() const {
    int n = 0;
    for (int i = 0; i < len; ++i) n += k[i];
    return n;
  }
  bool operator==(const MultiIndex&) const = default;
};

inline MultiIndex tri_index(int a, int b, int c) { return MultiIndex{{a, b, c, 0}, 3}; }

namespace detail {
inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}
}  // namespace detail

/// Multinomial coefficient n!/(k1! k2! k3!) of a triangle Bezier polynomial.
inline double multinomial(const MultiIndex& mi) {
  double c = detail::factorial(mi.degree());
  for (int i = 0; i < mi.len; ++i) c /= detail::factorial(mi.k[i]);
  return c;
}

/// B_mi evaluated at barycentric coordinates `bary` (three entries for a
/// triangle, four bilinear vertex weights for a Q1 quadrilateral).
inline double eval_basis(const MultiIndex& mi, std::span<const double> bary) {
  if (bary.size() != static_cast<std::size_t>(mi.len))
    throw std::invalid_argument("eval_basis: barycentric size does not match multi-index");
  if (mi.len == 4) {
    // Q1: B_{1000} = lambda_1 etc.
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
      if (mi.k[i] == 1) v = bary[i];
    return v;
  }
  double v = multinomial(mi);
  for (int i = 0; i < 3; ++i) v *= detail::ipow(bary[i], mi.k[i]);
  return v;
}

/// Partial derivatives dB_mi/dlambda_i for a triangle multi-index.
inline std::array<double, 3> eval_basis_dlambda(const MultiIndex& mi,
                                                std::span<const double> bary) {
  std::array<double, 3> d{};
  const double c = multinomial(mi);
  for (int i = 0; i < 3; ++i) {
    if (mi.k[i] == 0) continue;
    double v = c * mi.k[i] * detail::ipow(bary[i], mi.k[i] - 1);
    for (int j = 0; j < 3; ++j)
      if (j != i) v *= detail::ipow(bary[j], mi.k[j]);
    d[i] = v;
  }
  return d;
}

/// Integral of a degree-n Bezier polynomial as a fraction of the element
/// measure. Triangles: 2/((n+1)(n+2)); Q1 quadrilaterals (parallelograms): 1/4.
inline double basis_integral(int degree, ElementKind kind = ElementKind::triangle) {
  if (degree < 0) throw std::invalid_argument("basis_integral: negative degree");
  if (kind == ElementKind::quadrilateral) {
    if (degree != 1) throw UnsupportedElement("basis_integral: quadrilaterals support Q1 only");
    return 0.25;
  }
  return 2.0 / ((degree + 1.0) * (degree + 2.0));
}

/// Greville point of a multi-index: components / n.
inline std::vector<double> greville_point(const MultiIndex& mi) {
  const int n = mi.degree();
  if (n < 1) throw std::invalid_argument("greville_point: degree must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(mi.len));
  for (int i = 0; i < mi.len; ++i) g[static_cast<std::size_t>(i)] = double(mi.k[i]) / n;
  return g;
}

/// Per-(kind, degree) table of DOF multi-indices and their integral data.
/// `moment_weights[s][v]` expresses the first moment (1/|K|) int_K x B_s dx
/// as sum_v moment_weights[s][v] * x_v; exact for triangles and for
/// parallelogram quadrilaterals.
struct BasisTable {
  int degree = 1;
  ElementKind kind = ElementKind::triangle;
  std::vector<MultiIndex> dof_multiindices;
  std::vector<std::vector<double>> greville;
  std::vector<double> basis_integral;
  std::vector<std::vector<double>> moment_weights;

  std::size_t size() const { return dof_multiindices.size(); }

  double eval(const MultiIndex& mi, std::span<const double> bary) const {
    if (mi.len != static_cast<int>(greville.front().size()) || mi.degree() != degree)
      throw std::invalid_argument("BasisTable::eval: multi-index degree does not match table");
    return eval_basis(mi, bary);
  }
};

/// Triangle multi-indices of degree n, vertices first, then the remaining
/// ones in descending lexicographic order.
inline std::vector<MultiIndex> triangle_multiindices(int n) {
  if (n == 0) return {tri_index(0, 0, 0)};
  std::vector<MultiIndex> all;
  for (int a = n; a >= 0; --a)
    for (int b = n - a; b >= 0; --b) all.push_back(tri_index(a, b, n - a - b));
  std::vector<MultiIndex> out{tri_index(n, 0, 0), tri_index(0, n, 0), tri_index(0, 0, n)};
  for (const auto& mi : all) {
    const bool vertex = mi.k[0] == n || mi.k[1] == n || mi.k[2] == n;
    if (!vertex) out.push_back(mi);
  }
  return out;
}

inline BasisTable make_basis_table(ElementKind kind, int degree) {
  BasisTable t;
  t.kind = kind;
  t.degree = degree;
  if (kind == ElementKind::triangle) {
    if (degree < 1 || degree > 2)
      throw UnsupportedElement("triangle Bezier basis supports degree 1 and 2");
    t.dof_multiindices = triangle_multiindices(degree);
    for (const auto& mi : t.dof_multiindices) {
      t.greville.push_back(greville_point(mi));
      t.basis_integral.push_back(basis_integral(degree));
      // lambda_j B_k = (k_j + 1)/(n + 1) B_{k + e_j}, and every degree-(n+1)
      // Bezier polynomial integrates to 2/((n+2)(n+3)) |K|.
      std::vector<double> w(3);
      for (int j = 0; j < 3; ++j)
        w[static_cast<std::size_t>(j)] = (mi.k[j] + 1.0) / (degree + 1.0) * basis_integral(degree + 1);
      t.moment_weights.push_back(w);
    }
    return t;
  }
  if (degree != 1) throw UnsupportedElement("quadrilateral basis supports Q1 only");
  for (int v = 0; v < 4; ++v) {
    MultiIndex mi{{0, 0, 0, 0}, 4};
    mi.k[v] = 1;
    t.dof_multiindices.push_back(mi);
    std::vector<double> g(4, 0.0);
    g[static_cast<std::size_t>(v)] = 1.0;
    t.greville.push_back(g);
    t.basis_integral.push_back(0.25);
    // int lambda_v lambda_w over the unit square: 1/9 same vertex, 1/18 edge
    // neighbour, 1/36 opposite vertex.
    std::vector<double> w(4);
    for (int u = 0; u < 4; ++u) {
      const int d = (u - v + 4) % 4;
      w[static_cast<std::size_t>(u)] = d == 0 ? 1.0 / 9.0 : (d == 2 ? 1.0 / 36.0 : 1.0 / 18.0);
    }
    t.moment_weights.push_back(w);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Bilinear quadrilateral map from the unit square.

inline std::array<double, 4> q1_weights(const Vec2& xi) {
  return {(1 - xi.x) * (1 - xi.y), xi.x * (1 - xi.y), xi.x * xi.y, (1 - xi.x) * xi.y};
}

inline std::array<Vec2, 4> q1_gradients(const Vec2& xi) {
  return {Vec2{-(1 - xi.y), -(1 - xi.x)}, Vec2{1 - xi.y, -xi.x}, Vec2{xi.y, xi.x},
          Vec2{-xi.y, 1 - xi.x}};
}

namespace detail {
// |K| and int_K x B_sigma for a bilinear quad, by 3x3 Gauss (exact: the
// integrand is at most cubic per direction).
inline void quad_moments(std::span<const Vec2> x, double& area, std::array<Vec2, 4>& first) {
  const quadrature::Rule rule = quadrature::square(3);
  area = 0.0;
  first = {};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto lam = q1_weights(rule.points[q]);
    const auto g = q1_gradients(rule.points[q]);
    Vec2 dx_dxi{}, dx_deta{}, pos{};
    for (int v = 0; v < 4; ++v) {
      dx_dxi += g[v].x * x[v];
      dx_deta += g[v].y * x[v];
      pos += lam[v] * x[v];
    }
    const double w = rule.weights[q] * wedge(dx_dxi, dx_deta);
    area += w;
    for (int s = 0; s < 4; ++s) first[s] += (w * lam[s]) * pos;
  }
}

inline double signed_area(std::span<const Vec2> x) {
  double a = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) a += wedge(x[i], x[(i + 1) % x.size()]);
  return 0.5 * a;
}
}  // namespace detail

/// First moment (1/|K|) int_K x B_sigma dx of local DOF `sigma` on the element
/// with vertex coordinates `vertices` (CCW). Triangles use the tabulated
/// affine weights; quadrilaterals integrate the bilinear map exactly, which
/// reduces to the tabulated weights on parallelograms.
inline Vec2 moment_vector_z(const BasisTable& table, std::size_t sigma,
                            std::span<const Vec2> vertices) {
  if (sigma >= table.size()) throw std::out_of_range("moment_vector_z: DOF index");
  if (vertices.size() != static_cast<std::size_t>(vertex_count(table.kind)))
    throw UnsupportedElement("moment_vector_z: vertex count does not match element kind");
  if (table.kind == ElementKind::triangle) {
    Vec2 z{};
    for (std::size_t v = 0; v < 3; ++v) z += table.moment_weights[sigma][v] * vertices[v];
    return z;
  }
  double area = 0.0;
  std::array<Vec2, 4> first{};
  detail::quad_moments(vertices, area, first);
  if (!(area > 0.0)) throw DegenerateElement("moment_vector_z: non-positive quadrilateral area");
  return (1.0 / area) * first[sigma];
}

}  // namespace amrd
