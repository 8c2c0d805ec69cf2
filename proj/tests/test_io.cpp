#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "amrd/io.hpp"

using namespace amrd;

namespace {
const Gas kGas{1.4};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t find_line(const std::vector<std::string>& v, const std::string& prefix) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].rfind(prefix, 0) == 0) return i;
  return v.size();
}

std::string vtk(const FESpace& sp, const std::vector<State>& u) {
  std::ostringstream os;
  write_vtk(os, sp, u, kGas);
  return os.str();
}
}  // namespace

TEST(Vtk, B1TrianglesLayoutAndFields) {
  const FESpace sp = make_space(structured_triangles(2, 2, 0, 1, 0, 1), 1);
  const State c = to_conservative({2.0, {0.5, -1.0}, 3.0}, kGas);
  const auto L = lines(vtk(sp, std::vector<State>(sp.ndofs(), c)));
  EXPECT_EQ(L[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(L[2], "ASCII");
  EXPECT_EQ(L[3], "DATASET UNSTRUCTURED_GRID");
  EXPECT_EQ(L[4], "POINTS 24 double");
  EXPECT_EQ(L[find_line(L, "CELLS")], "CELLS 8 32");
  const auto ct = find_line(L, "CELL_TYPES");
  EXPECT_EQ(L[ct], "CELL_TYPES 8");
  EXPECT_EQ(L[ct + 1], "5");
  EXPECT_EQ(L[find_line(L, "POINT_DATA")], "POINT_DATA 24");
  const auto rho = find_line(L, "SCALARS rho");
  ASSERT_LT(rho, L.size());
  EXPECT_EQ(L[rho + 1], "LOOKUP_TABLE default");
  EXPECT_DOUBLE_EQ(std::stod(L[rho + 2]), 2.0);
  const auto v = find_line(L, "VECTORS v");
  ASSERT_LT(v, L.size());
  std::istringstream vs(L[v + 1]);
  double vx, vy, vz;
  vs >> vx >> vy >> vz;
  EXPECT_NEAR(vx, 0.5, 1e-15);
  EXPECT_NEAR(vy, -1.0, 1e-15);
  const auto p = find_line(L, "SCALARS p");
  ASSERT_LT(p, L.size());
  EXPECT_NEAR(std::stod(L[p + 2]), 3.0, 1e-14);
  const auto J = find_line(L, "SCALARS J");
  ASSERT_LT(J, L.size());
  // first point of the first element is (0, 0)
  EXPECT_EQ(std::stod(L[J + 2]), 0.0);
  EXPECT_EQ(L.size(), J + 2 + 24);
}

TEST(Vtk, JIsPointwiseWedge) {
  const FESpace sp = make_space(structured_triangles(1, 1, 1, 2, 1, 2), 1);
  const State c = to_conservative({2.0, {0.5, -1.0}, 3.0}, kGas);
  const auto L = lines(vtk(sp, std::vector<State>(sp.ndofs(), c)));
  const auto pts = find_line(L, "POINTS");
  const auto J = find_line(L, "SCALARS J");
  for (std::size_t i = 0; i < 6; ++i) {
    std::istringstream ps(L[pts + 1 + i]);
    double x, y;
    ps >> x >> y;
    EXPECT_NEAR(std::stod(L[J + 2 + i]), x * (2.0 * -1.0) - y * (2.0 * 0.5), 1e-14);
  }
}

TEST(Vtk, B2SplitsIntoFourLinearTriangles) {
  const FESpace sp = make_space(structured_triangles(2, 1, 0, 1, 0, 1), 2);
  const auto L = lines(vtk(sp, std::vector<State>(sp.ndofs(), State{1, 0, 0, 2.5})));
  EXPECT_EQ(L[4], "POINTS 24 double");
  EXPECT_EQ(L[find_line(L, "CELLS")], "CELLS 16 64");
  EXPECT_EQ(L[find_line(L, "CELL_TYPES") + 1], "5");
}

TEST(Vtk, B2ValuesAreFieldValuesNotControlPoints) {
  // a quadratic density: control value at an edge differs from the point value
  const FESpace sp = make_space(structured_triangles(1, 1, 0, 1, 0, 1), 2);
  std::vector<State> u(sp.ndofs(), State{1, 0, 0, 2.5});
  const auto g = sp.dofs.dofs(0);
  u[static_cast<std::size_t>(g[3])][0] = 2.0;
  const auto L = lines(vtk(sp, u));
  const auto rho = find_line(L, "SCALARS rho");
  EXPECT_NEAR(std::stod(L[rho + 2 + 3]), 1.5, 1e-15);
  EXPECT_NEAR(std::stod(L[rho + 2 + 0]), 1.0, 1e-15);
}

TEST(Vtk, QuadCells) {
  const FESpace sp = make_space(structured_quads(3, 2, 0, 1, 0, 1), 1);
  const auto L = lines(vtk(sp, std::vector<State>(sp.ndofs(), State{1, 0, 0, 2.5})));
  EXPECT_EQ(L[4], "POINTS 24 double");
  EXPECT_EQ(L[find_line(L, "CELLS")], "CELLS 6 30");
  EXPECT_EQ(L[find_line(L, "CELL_TYPES") + 1], "9");
}

TEST(Vtk, UnwritablePath) {
  const FESpace sp = make_space(structured_triangles(1, 1, 0, 1, 0, 1), 1);
  EXPECT_THROW(write_vtk("/nonexistent_dir/x.vtk", sp, std::vector<State>(sp.ndofs(), State{1, 0, 0, 2.5}), kGas),
               Error);
}
