#include <gtest/gtest.h>

#include <array>
#include <random>

#include "amrd/bezier_basis.hpp"
#include "amrd/fe_space.hpp"
#include "amrd/mesh.hpp"

using namespace amrd;

namespace {
double eval3(const MultiIndex& mi, double a, double b, double c) {
  const std::array<double, 3> l{a, b, c};
  return eval_basis(mi, l);
}
}  // namespace

TEST(BezierBasis, VertexValue) { EXPECT_DOUBLE_EQ(eval3(tri_index(2, 0, 0), 1, 0, 0), 1.0); }

TEST(BezierBasis, EdgeAndBubbleValues) {
  EXPECT_DOUBLE_EQ(eval3(tri_index(1, 1, 0), 0.5, 0.5, 0), 0.5);
  EXPECT_NEAR(eval3(tri_index(1, 1, 1), 1.0 / 3, 1.0 / 3, 1.0 / 3), 2.0 / 9.0, 1e-15);
}

TEST(BezierBasis, DegreeMismatchThrows) {
  const std::array<double, 4> l{0.25, 0.25, 0.25, 0.25};
  EXPECT_THROW(eval_basis(tri_index(1, 0, 0), l), std::invalid_argument);
  const auto table = make_basis_table(ElementKind::triangle, 2);
  const std::array<double, 3> b{0.2, 0.3, 0.5};
  EXPECT_THROW(table.eval(tri_index(1, 0, 0), b), std::invalid_argument);
}

TEST(BezierBasis, PartitionOfUnityAndPositivity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int n = 1; n <= 3; ++n)
    for (int s = 0; s < 50; ++s) {
      double a = U(rng), b = U(rng) * (1 - a);
      double sum = 0.0;
      for (const auto& mi : triangle_multiindices(n)) {
        const double v = eval3(mi, a, b, 1 - a - b);
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
    }
}

TEST(BezierBasis, BasisIntegral) {
  EXPECT_DOUBLE_EQ(basis_integral(1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(basis_integral(2), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(basis_integral(0), 1.0);
  EXPECT_DOUBLE_EQ(basis_integral(1, ElementKind::quadrilateral), 0.25);
  EXPECT_THROW(basis_integral(2, ElementKind::quadrilateral), UnsupportedElement);
}

TEST(BezierBasis, BasisIntegralMatchesQuadrature) {
  for (int deg : {1, 2}) {
    const auto ref = make_reference(ElementKind::triangle, deg);
    const auto nloc = static_cast<std::size_t>(ref.nloc);
    for (std::size_t s = 0; s < nloc; ++s) {
      double I = 0.0;
      for (std::size_t q = 0; q < ref.nq(); ++q) I += ref.vol.weights[q] * ref.phi[q * nloc + s];
      EXPECT_NEAR(2.0 * I, basis_integral(deg), 1e-14);
    }
  }
}

TEST(BezierBasis, GrevillePoints) {
  EXPECT_EQ(greville_point(tri_index(1, 0, 0)), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(greville_point(tri_index(1, 1, 0)), (std::vector<double>{0.5, 0.5, 0}));
  EXPECT_EQ(greville_point(tri_index(0, 0, 2)), (std::vector<double>{0, 0, 1}));
}

TEST(BezierBasis, DofOrdering) {
  const auto p2 = triangle_multiindices(2);
  ASSERT_EQ(p2.size(), 6u);
  EXPECT_EQ(p2[0], tri_index(2, 0, 0));
  EXPECT_EQ(p2[1], tri_index(0, 2, 0));
  EXPECT_EQ(p2[2], tri_index(0, 0, 2));
  EXPECT_EQ(p2[3], tri_index(1, 1, 0));
  EXPECT_EQ(p2[4], tri_index(1, 0, 1));
  EXPECT_EQ(p2[5], tri_index(0, 1, 1));
  // edge DOFs sit between the vertex pairs recorded for the DOF map
  for (std::size_t e = 0; e < 3; ++e) {
    const auto& mi = p2[3 + e];
    EXPECT_EQ(mi.k[kTriangleEdgeDofVertices[e][0]], 1);
    EXPECT_EQ(mi.k[kTriangleEdgeDofVertices[e][1]], 1);
  }
}

TEST(BezierBasis, MomentVectorTables) {
  const std::array<Vec2, 3> tri{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
  const auto p1 = make_basis_table(ElementKind::triangle, 1);
  const Vec2 z1 = moment_vector_z(p1, 0, tri);
  EXPECT_NEAR(z1.x, 1.0 / 12, 1e-15);
  EXPECT_NEAR(z1.y, 1.0 / 12, 1e-15);
  EXPECT_NEAR(p1.moment_weights[0][0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(p1.moment_weights[0][1], 1.0 / 12, 1e-15);

  const auto p2 = make_basis_table(ElementKind::triangle, 2);
  const Vec2 z110 = moment_vector_z(p2, 3, tri);
  EXPECT_NEAR(z110.x, 1.0 / 15, 1e-15);
  EXPECT_NEAR(z110.y, 1.0 / 30, 1e-15);

  const std::array<Vec2, 4> sq{Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  const auto q1 = make_basis_table(ElementKind::quadrilateral, 1);
  const Vec2 zq = moment_vector_z(q1, 0, sq);
  EXPECT_NEAR(zq.x, 1.0 / 12, 1e-15);
  EXPECT_NEAR(zq.y, 1.0 / 12, 1e-15);

  EXPECT_THROW(make_basis_table(ElementKind::quadrilateral, 2), UnsupportedElement);
  EXPECT_THROW(moment_vector_z(p1, 0, sq), UnsupportedElement);
}

TEST(BezierBasis, MomentVectorMatchesQuadrature) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int deg : {1, 2}) {
    const auto ref = make_reference(ElementKind::triangle, deg);
    for (int s = 0; s < 20; ++s) {
      std::array<Vec2, 3> x{Vec2{U(rng), U(rng)}, Vec2{U(rng), U(rng)}, Vec2{U(rng), U(rng)}};
      if (detail::signed_area(x) < 0) std::swap(x[1], x[2]);
      if (detail::signed_area(x) < 1e-2) continue;
      const auto d = make_element_data(ref, x);
      for (std::size_t sig = 0; sig < static_cast<std::size_t>(ref.nloc); ++sig) {
        const Vec2 z = moment_vector_z(ref.table, sig, x);
        EXPECT_NEAR(d.area * z.x, d.zmom[sig].x, 1e-14);
        EXPECT_NEAR(d.area * z.y, d.zmom[sig].y, 1e-14);
      }
    }
  }
}

TEST(LumpedMeasures, SingleTriangle) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.elements = {{0, 1, 2, -1}};
  build_connectivity(m);
  const auto lm = assemble_lumped(m, 1);
  for (double c : lm.c_sigma) EXPECT_NEAR(c, 0.5 / 3, 1e-15);
  EXPECT_NEAR(lm.y_sigma[0].x, 0.25, 1e-15);
  EXPECT_NEAR(lm.y_sigma[0].y, 0.25, 1e-15);
}

TEST(LumpedMeasures, TwoTrianglesShareVertex) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.elements = {{0, 1, 2, -1}, {0, 2, 3, -1}};
  build_connectivity(m);
  const auto lm = assemble_lumped(m, 1);
  EXPECT_NEAR(lm.c_sigma[0], 2.0 * 0.5 / 3, 1e-15);
  EXPECT_NEAR(lm.c_sigma[1], 0.5 / 3, 1e-15);
  double total = 0.0;
  for (double c : lm.c_sigma) total += c;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(LumpedMeasures, PositiveOnB2Mesh) {
  const auto lm = assemble_lumped(structured_triangles(4, 3, 0, 2, 0, 1), 2);
  double total = 0.0;
  for (double c : lm.c_sigma) {
    EXPECT_GT(c, 0.0);
    total += c;
  }
  EXPECT_NEAR(total, 2.0, 1e-14);
}

TEST(LumpedMeasures, ZeroAreaElementRejected) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {2, 0}};
  m.elements = {{0, 1, 2, -1}};
  EXPECT_THROW(build_connectivity(m), DegenerateMesh);
}
