#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "amrd/mesh.hpp"

using namespace amrd;

namespace {
const std::string kData = std::string(AMRD_SOURCE_DIR) + "/tests/data/";

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Mesh two_triangle_square() { return load_gmsh(kData + "two_triangles.msh"); }

int count_tag(const Mesh& m, const std::string& tag) {
  int n = 0;
  for (const auto& f : m.boundary_faces) n += f.tag == tag;
  return n;
}
}  // namespace

TEST(Gmsh, TwoTriangleSquare) {
  const Mesh m = two_triangle_square();
  EXPECT_EQ(m.vertices.size(), 4u);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.interior_edges.size(), 1u);
  EXPECT_EQ(m.boundary_faces.size(), 4u);
  EXPECT_EQ(count_tag(m, "wall"), 4);
}

TEST(Gmsh, DanglingNodeIsKept) {
  std::string txt = read_file(kData + "two_triangles.msh");
  const auto pos = txt.find("4\n1 0 0 0");
  txt.replace(pos, 1, "5");
  txt.insert(txt.find("$EndNodes"), "5 2 2 0\n");
  std::istringstream in(txt);
  const Mesh m = load_gmsh(in);
  EXPECT_EQ(m.vertices.size(), 5u);
  for (const auto& e : m.elements)
    for (int i = 0; i < 3; ++i) EXPECT_NE(e[i], 4);
  EXPECT_EQ(build_dofmap(m, 1).ndofs, 4u);
}

TEST(Gmsh, TruncatedFileIsFormatError) {
  const std::string txt = read_file(kData + "two_triangles.msh");
  std::istringstream in(txt.substr(0, txt.find("$EndNodes") - 4));
  try {
    load_gmsh(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(Gmsh, MissingFile) { EXPECT_THROW(load_gmsh(kData + "does_not_exist.msh"), FormatError); }

TEST(Connectivity, ClockwiseElementsAreReoriented) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.elements = {{0, 2, 1, -1}};
  build_connectivity(m);
  EXPECT_GT(m.element_area(0), 0.0);
}

TEST(Connectivity, EdgeSharedByThreeElements) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}};
  m.elements = {{0, 1, 2, -1}, {0, 3, 1, -1}, {0, 1, 4, -1}};
  EXPECT_THROW(build_connectivity(m), ConformalityError);
}

TEST(Connectivity, HangingNode) {
  // big triangle next to two small ones splitting its edge
  Mesh m;
  m.vertices = {{0, 0}, {0, 2}, {-1, 1}, {1, 1}, {0, 1}};
  m.elements = {{0, 1, 2, -1}, {0, 3, 4, -1}, {4, 3, 1, -1}};
  EXPECT_THROW(build_connectivity(m), ConformalityError);
}

TEST(Generators, StructuredCounts) {
  const Mesh q = structured_quads(4, 3, 0, 1, 0, 1);
  EXPECT_EQ(q.size(), 12u);
  EXPECT_EQ(q.boundary_faces.size(), 14u);
  EXPECT_EQ(q.interior_edges.size(), 17u);
  EXPECT_EQ(count_tag(q, "left"), 3);
  EXPECT_EQ(count_tag(q, "top"), 4);
  const Mesh t = structured_triangles(4, 3, 0, 1, 0, 1);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.interior_edges.size(), 17u + 12u);
  double area = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) area += t.element_area(k);
  EXPECT_NEAR(area, 1.0, 1e-14);
}

TEST(Generators, Disc) {
  const Mesh d = disc_mesh(2.0, 5);
  EXPECT_EQ(d.vertices.size(), 1u + 3u * 5u * 6u);
  EXPECT_EQ(d.size(), 6u * 25u);
  EXPECT_EQ(count_tag(d, "outer"), 30);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_GT(d.element_area(k), 0.0);
}

TEST(DofMap, Counts) {
  const Mesh m = two_triangle_square();
  EXPECT_EQ(build_dofmap(m, 1).ndofs, 4u);
  EXPECT_EQ(build_dofmap(m, 2).ndofs, 9u);
  Mesh one;
  one.vertices = {{0, 0}, {1, 0}, {0, 1}};
  one.elements = {{0, 1, 2, -1}};
  build_connectivity(one);
  EXPECT_EQ(build_dofmap(one, 2).ndofs, 6u);
  EXPECT_THROW(build_dofmap(structured_quads(2, 2, 0, 1, 0, 1), 2), UnsupportedElement);
}

TEST(DofMap, EdgeDofsAreShared) {
  const Mesh m = structured_triangles(3, 3, 0, 1, 0, 1);
  const DofMap d = build_dofmap(m, 2);
  // vertices + edges
  EXPECT_EQ(d.ndofs, 16u + (m.interior_edges.size() + m.boundary_faces.size()));
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto g = d.dofs(k);
    for (std::size_t e = 0; e < 3; ++e) {
      const auto [a, b] = kTriangleEdgeDofVertices[e];
      const Vec2 mid = 0.5 * (m.vertices[m.elements[k][a]] + m.vertices[m.elements[k][b]]);
      EXPECT_LT(norm(d.dof_position[g[3 + e]] - mid), 1e-14);
    }
  }
}

TEST(Periodic, LeftRightReducesDofs) {
  const Mesh m = structured_triangles(4, 3, 0, 1, 0, 1);
  const Mesh p = make_periodic(m, "left", "right", {1, 0});
  EXPECT_EQ(build_dofmap(m, 1).ndofs - build_dofmap(p, 1).ndofs, 4u);
  EXPECT_EQ(build_dofmap(m, 2).ndofs - build_dofmap(p, 2).ndofs, 4u + 3u);
  EXPECT_EQ(p.boundary_faces.size(), m.boundary_faces.size() - 6u);
  int periodic = 0;
  for (const auto& ie : p.interior_edges) periodic += ie.periodic;
  EXPECT_EQ(periodic, 3);
}

TEST(Periodic, MismatchedResolution) {
  // left side split in two, right side in three
  Mesh m = structured_triangles(2, 2, 0, 1, 0, 1);
  Mesh n = structured_triangles(2, 3, 0, 1, 0, 1);
  EXPECT_NO_THROW(make_periodic(m, "left", "right", {1, 0}));
  EXPECT_THROW(make_periodic(m, "left", "top", {0, 1}), PeriodicityMismatch);
  EXPECT_THROW(make_periodic(n, "left", "bottom", {1, 0}), PeriodicityMismatch);
}

TEST(Periodic, DoublyPeriodicCornersMerge) {
  Mesh m = structured_triangles(4, 4, -1, 1, -1, 1);
  m = make_periodic(m, "left", "right", {2, 0});
  m = make_periodic(m, "bottom", "top", {0, 2});
  EXPECT_TRUE(m.boundary_faces.empty());
  const DofMap d = build_dofmap(m, 1);
  EXPECT_EQ(d.ndofs, 16u);
  std::set<int> corner;
  for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v) {
    const Vec2 x = m.vertices[v];
    if (std::abs(std::abs(x.x) - 1) < 1e-12 && std::abs(std::abs(x.y) - 1) < 1e-12) corner.insert(m.vertex_rep[v]);
  }
  EXPECT_EQ(corner.size(), 1u);
}
