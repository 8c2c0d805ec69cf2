#pragma once

// VTK legacy ASCII snapshots. Each element writes its own points (the DOF
// Greville points) so periodic images and B2 sub-triangles need no shared
// numbering. B2 triangles are split into four linear sub-triangles.

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "amrd/core.hpp"
#include "amrd/euler_physics.hpp"
#include "amrd/fe_space.hpp"

namespace amrd {

inline void write_vtk(std::ostream& os, const FESpace& sp, std::span<const State> u, const Gas& gas,
                      const std::string& title = "amrd snapshot") {
  const std::size_t nloc = sp.nloc(), ne = sp.mesh.size();
  const bool b2 = sp.degree() == 2;
  std::vector<Vec2> pts;
  std::vector<State> vals;
  pts.reserve(ne * nloc);
  vals.reserve(ne * nloc);
  std::vector<double> phi(nloc);
  std::vector<Vec2> grad(nloc);
  for (std::size_t k = 0; k < ne; ++k) {
    const auto g = sp.dofs.dofs(k);
    for (std::size_t s = 0; s < nloc; ++s) {
      const auto& gr = sp.ref.table.greville[s];
      const Vec2 xi = sp.ref.kind == ElementKind::triangle ? Vec2{gr[1], gr[2]} : sp.ref.vref[s];
      sp.ref.eval(xi, phi.data(), grad.data());
      State v{};
      for (std::size_t t = 0; t < nloc; ++t) v += phi[t] * u[static_cast<std::size_t>(g[t])];
      pts.push_back(sp.elem[k].xdof[s]);
      vals.push_back(v);
    }
  }
  std::vector<std::array<std::size_t, 4>> cells;
  int cell_type = 5;
  for (std::size_t k = 0; k < ne; ++k) {
    const std::size_t o = k * nloc;
    if (b2) {
      cells.push_back({o + 0, o + 3, o + 4, 0});
      cells.push_back({o + 3, o + 1, o + 5, 0});
      cells.push_back({o + 4, o + 5, o + 2, 0});
      cells.push_back({o + 3, o + 5, o + 4, 0});
    } else if (nloc == 4) {
      cells.push_back({o, o + 1, o + 2, o + 3});
      cell_type = 9;
    } else {
      cells.push_back({o, o + 1, o + 2, 0});
    }
  }
  const std::size_t nv = cell_type == 9 ? 4 : 3;
  char buf[160];
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << pts.size() << " double\n";
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x, p.y);
    os << buf;
  }
  os << "CELLS " << cells.size() << ' ' << cells.size() * (nv + 1) << '\n';
  for (const auto& c : cells) {
    os << nv;
    for (std::size_t i = 0; i < nv; ++i) os << ' ' << c[i];
    os << '\n';
  }
  os << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) os << cell_type << '\n';
  os << "POINT_DATA " << pts.size() << '\n';
  auto scalar = [&](const char* name, auto fn) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", fn(i));
      os << buf;
    }
  };
  scalar("rho", [&](std::size_t i) { return vals[i][0]; });
  os << "VECTORS v double\n";
  for (const auto& v : vals) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v[1] / v[0], v[2] / v[0]);
    os << buf;
  }
  scalar("p", [&](std::size_t i) {
    const auto& v = vals[i];
    return (gas.gamma - 1.0) * (v[3] - 0.5 * (v[1] * v[1] + v[2] * v[2]) / v[0]);
  });
  scalar("J", [&](std::size_t i) { return wedge(pts[i], momentum(vals[i])); });
}

inline void write_vtk(const std::string& path, const FESpace& sp, std::span<const State> u, const Gas& gas,
                      const std::string& title = "amrd snapshot") {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_vtk(f, sp, u, gas, title);
}

}  // namespace amrd
