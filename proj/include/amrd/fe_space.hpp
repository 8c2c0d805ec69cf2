#pragma once

// Reference elements (basis values and gradients at quadrature points) and
// the per-element geometric data every assembly pass reads: quadrature
// weights, physical gradients, edge normals, DOF positions, basis integrals,
// first moments and the local mass matrix. Also the lumped measures |C_s|
// and moment anchors y_s.

#include <array>
#include <span>
#include <vector>

#include "amrd/bezier_basis.hpp"
#include "amrd/core.hpp"
#include "amrd/mesh.hpp"
#include "amrd/quadrature.hpp"

namespace amrd {

struct ReferenceElement {
  ElementKind kind = ElementKind::triangle;
  int degree = 1;
  int nloc = 3;
  int nvert = 3;
  BasisTable table;
  quadrature::Rule vol;
  quadrature::LineRule line;
  std::array<Vec2, 4> vref{};
  std::vector<double> phi;   // [q * nloc + s]
  std::vector<Vec2> dphi;    // reference gradients, same layout
  std::vector<double> ephi;  // [(e * nq_line + q) * nloc + s]
  std::vector<Vec2> edphi;

  std::size_t nq() const { return vol.size(); }
  std::size_t nq_edge() const { return line.size(); }

  void eval(const Vec2& xi, double* val, Vec2* grad) const {
    if (kind == ElementKind::quadrilateral) {
      const auto w = q1_weights(xi);
      const auto g = q1_gradients(xi);
      for (int s = 0; s < 4; ++s) {
        val[s] = w[s];
        grad[s] = g[s];
      }
      return;
    }
    const std::array<double, 3> lam{1.0 - xi.x - xi.y, xi.x, xi.y};
    for (int s = 0; s < nloc; ++s) {
      const auto& mi = table.dof_multiindices[static_cast<std::size_t>(s)];
      val[s] = eval_basis(mi, lam);
      const auto d = eval_basis_dlambda(mi, lam);
      grad[s] = {d[1] - d[0], d[2] - d[0]};
    }
  }
};

inline ReferenceElement make_reference(ElementKind kind, int degree) {
  ReferenceElement r;
  r.kind = kind;
  r.degree = degree;
  r.table = make_basis_table(kind, degree);
  r.nloc = static_cast<int>(r.table.size());
  r.nvert = vertex_count(kind);
  if (kind == ElementKind::triangle) {
    r.vol = quadrature::triangle(degree == 1 ? 4 : 6);
    r.vref = {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}, Vec2{}};
  } else {
    r.vol = quadrature::square(3);
    r.vref = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  }
  r.line = quadrature::gauss_legendre(degree == 1 ? 3 : 4);
  const auto nloc = static_cast<std::size_t>(r.nloc);
  r.phi.resize(r.nq() * nloc);
  r.dphi.resize(r.nq() * nloc);
  for (std::size_t q = 0; q < r.nq(); ++q) r.eval(r.vol.points[q], &r.phi[q * nloc], &r.dphi[q * nloc]);
  const std::size_t ne = static_cast<std::size_t>(r.nvert) * r.nq_edge();
  r.ephi.resize(ne * nloc);
  r.edphi.resize(ne * nloc);
  for (int e = 0; e < r.nvert; ++e)
    for (std::size_t q = 0; q < r.nq_edge(); ++q) {
      const Vec2 a = r.vref[static_cast<std::size_t>(e)], b = r.vref[static_cast<std::size_t>((e + 1) % r.nvert)];
      const Vec2 xi = a + r.line.points[q] * (b - a);
      const std::size_t o = (static_cast<std::size_t>(e) * r.nq_edge() + q) * nloc;
      r.eval(xi, &r.ephi[o], &r.edphi[o]);
    }
  return r;
}

/// Physical data of one element. Gradients are stored per quadrature point
/// with the same layout as the reference tables.
struct ElementData {
  double area = 0.0;
  double h = 0.0;  // 2|K|/perimeter (triangles), shortest edge (quads)
  std::vector<double> w;
  std::vector<Vec2> x;
  std::vector<Vec2> grad;
  std::array<Vec2, 4> normal{};
  std::array<double, 4> length{};
  std::vector<double> ew;
  std::vector<Vec2> ex;
  std::vector<Vec2> egrad;
  std::vector<Vec2> xdof;     // Greville points x_s^K
  std::vector<double> bint;   // int_K B_s
  std::vector<Vec2> zmom;     // int_K x B_s = |K| z_s^K
  std::vector<double> mass;   // nloc x nloc
  std::vector<Vec2> anchor;   // y_s in this element's frame
  double phigrad_max = 0.0;   // max over s, s' of |int_K B_s grad B_s'|
};

namespace detail {
// Jacobian columns of the reference map at xi.
inline void map_jacobian(const ReferenceElement& r, std::span<const Vec2> xv, const Vec2& xi, Vec2& a, Vec2& b) {
  if (r.kind == ElementKind::triangle) {
    a = xv[1] - xv[0];
    b = xv[2] - xv[0];
    return;
  }
  const auto g = q1_gradients(xi);
  a = {};
  b = {};
  for (int v = 0; v < 4; ++v) {
    a += g[v].x * xv[v];
    b += g[v].y * xv[v];
  }
}

inline Vec2 map_point(const ReferenceElement& r, std::span<const Vec2> xv, const Vec2& xi) {
  if (r.kind == ElementKind::triangle) return xv[0] + xi.x * (xv[1] - xv[0]) + xi.y * (xv[2] - xv[0]);
  const auto w = q1_weights(xi);
  Vec2 p{};
  for (int v = 0; v < 4; ++v) p += w[v] * xv[v];
  return p;
}

// J^{-T} g for J = [a b]
inline Vec2 push_gradient(const Vec2& a, const Vec2& b, double det, const Vec2& g) {
  return {(b.y * g.x - a.y * g.y) / det, (-b.x * g.x + a.x * g.y) / det};
}
}  // namespace detail

inline ElementData make_element_data(const ReferenceElement& r, std::span<const Vec2> xv) {
  ElementData d;
  const auto nloc = static_cast<std::size_t>(r.nloc);
  const std::size_t nq = r.nq();
  d.w.resize(nq);
  d.x.resize(nq);
  d.grad.resize(nq * nloc);
  d.bint.assign(nloc, 0.0);
  d.zmom.assign(nloc, Vec2{});
  d.mass.assign(nloc * nloc, 0.0);
  for (std::size_t q = 0; q < nq; ++q) {
    Vec2 a, b;
    detail::map_jacobian(r, xv, r.vol.points[q], a, b);
    const double det = wedge(a, b);
    if (!(det > 0.0)) throw DegenerateMesh("element with non-positive Jacobian");
    d.w[q] = r.vol.weights[q] * det;
    d.x[q] = detail::map_point(r, xv, r.vol.points[q]);
    d.area += d.w[q];
    for (std::size_t s = 0; s < nloc; ++s) {
      const double ps = r.phi[q * nloc + s];
      d.grad[q * nloc + s] = detail::push_gradient(a, b, det, r.dphi[q * nloc + s]);
      d.bint[s] += d.w[q] * ps;
      d.zmom[s] += (d.w[q] * ps) * d.x[q];
      for (std::size_t t = 0; t < nloc; ++t) d.mass[s * nloc + t] += d.w[q] * ps * r.phi[q * nloc + t];
    }
  }
  for (std::size_t s = 0; s < nloc; ++s)
    for (std::size_t t = 0; t < nloc; ++t) {
      Vec2 m{};
      for (std::size_t q = 0; q < nq; ++q) m += (d.w[q] * r.phi[q * nloc + s]) * d.grad[q * nloc + t];
      d.phigrad_max = std::max(d.phigrad_max, norm(m));
    }
  const std::size_t nqe = r.nq_edge();
  const auto nv = static_cast<std::size_t>(r.nvert);
  d.ew.resize(nv * nqe);
  d.ex.resize(nv * nqe);
  d.egrad.resize(nv * nqe * nloc);
  double perimeter = 0.0, shortest = 1e300;
  for (std::size_t e = 0; e < nv; ++e) {
    const Vec2 t = xv[(e + 1) % nv] - xv[e];
    d.length[e] = norm(t);
    d.normal[e] = (1.0 / d.length[e]) * Vec2{t.y, -t.x};
    perimeter += d.length[e];
    shortest = std::min(shortest, d.length[e]);
    for (std::size_t q = 0; q < nqe; ++q) {
      const std::size_t eq = e * nqe + q;
      const Vec2 ra = r.vref[e], rb = r.vref[(e + 1) % nv];
      const Vec2 xi = ra + r.line.points[q] * (rb - ra);
      d.ew[eq] = r.line.weights[q] * d.length[e];
      d.ex[eq] = xv[e] + r.line.points[q] * t;
      Vec2 a, b;
      detail::map_jacobian(r, xv, xi, a, b);
      const double det = wedge(a, b);
      for (std::size_t s = 0; s < nloc; ++s)
        d.egrad[eq * nloc + s] = detail::push_gradient(a, b, det, r.edphi[eq * nloc + s]);
    }
  }
  d.h = r.kind == ElementKind::triangle ? 2.0 * d.area / perimeter : shortest;
  d.xdof.resize(nloc);
  for (std::size_t s = 0; s < nloc; ++s) {
    const auto& g = r.table.greville[s];
    Vec2 p{};
    for (std::size_t v = 0; v < g.size(); ++v) p += g[v] * xv[v];
    d.xdof[s] = p;
  }
  return d;
}

struct LumpedMeasures {
  std::vector<double> c_sigma;
  std::vector<Vec2> y_sigma;
  std::vector<Vec2> x_sigma;  // frame in which y_sigma is expressed
};

/// |C_s| = sum_K int_K B_s and |C_s| y_s = sum_K int_K x B_s. Contributions
/// from periodic images are shifted into the frame of dofs.dof_position, and
/// every element gets its own copy of the anchors in its own frame.
inline LumpedMeasures assemble_lumped(const DofMap& dofs, std::vector<ElementData>& elem) {
  LumpedMeasures lm;
  lm.c_sigma.assign(dofs.ndofs, 0.0);
  lm.y_sigma.assign(dofs.ndofs, Vec2{});
  lm.x_sigma = dofs.dof_position;
  for (std::size_t k = 0; k < elem.size(); ++k) {
    const auto g = dofs.dofs(k);
    for (std::size_t s = 0; s < g.size(); ++s) {
      const auto i = static_cast<std::size_t>(g[s]);
      lm.c_sigma[i] += elem[k].bint[s];
      lm.y_sigma[i] += elem[k].zmom[s] + elem[k].bint[s] * (lm.x_sigma[i] - elem[k].xdof[s]);
    }
  }
  for (std::size_t i = 0; i < dofs.ndofs; ++i) {
    if (!(lm.c_sigma[i] > 0.0)) throw DegenerateMesh("DOF " + std::to_string(i) + " has non-positive |C_s|");
    lm.y_sigma[i] = (1.0 / lm.c_sigma[i]) * lm.y_sigma[i];
  }
  for (std::size_t k = 0; k < elem.size(); ++k) {
    const auto g = dofs.dofs(k);
    elem[k].anchor.resize(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) {
      const auto i = static_cast<std::size_t>(g[s]);
      elem[k].anchor[s] = lm.y_sigma[i] + (elem[k].xdof[s] - lm.x_sigma[i]);
    }
  }
  return lm;
}

/// Everything the solver needs about the discrete space.
struct FESpace {
  Mesh mesh;
  DofMap dofs;
  ReferenceElement ref;
  std::vector<ElementData> elem;
  LumpedMeasures lumped;

  std::size_t ndofs() const { return dofs.ndofs; }
  std::size_t nloc() const { return static_cast<std::size_t>(ref.nloc); }
  int degree() const { return ref.degree; }
  double total_area() const {
    double a = 0.0;
    for (const auto& e : elem) a += e.area;
    return a;
  }
};

inline FESpace make_space(Mesh mesh, int degree) {
  FESpace sp;
  sp.dofs = build_dofmap(mesh, degree);
  sp.ref = make_reference(mesh.kind, degree);
  sp.elem.reserve(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const auto xv = mesh.element_vertices(k);
    sp.elem.push_back(make_element_data(sp.ref, std::span<const Vec2>(xv.data(), static_cast<std::size_t>(mesh.nvert()))));
  }
  sp.lumped = assemble_lumped(sp.dofs, sp.elem);
  sp.mesh = std::move(mesh);
  return sp;
}

/// Convenience wrapper matching the mesh + degree signature.
inline LumpedMeasures assemble_lumped(const Mesh& mesh, int degree) {
  return make_space(mesh, degree).lumped;
}

}  // namespace amrd
