#pragma once

// Explicit deferred correction in time. One step runs `iters` sweeps
// U^{p+1} = U^p - diag(1/|C_s|) L2(U^p) over the M+1 sub-step states, where
// L2 combines the element time term, theta-weighted spatial residuals, PSI
// limiting, CiP jumps, boundary residuals and the angular correction.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "amrd/angular_correction.hpp"
#include "amrd/core.hpp"
#include "amrd/euler_physics.hpp"
#include "amrd/fe_space.hpp"
#include "amrd/parallel.hpp"
#include "amrd/residual_schemes.hpp"

namespace amrd {

/// theta[l][k], l = 1..M (row 0 unused), as fractions of dt.
struct ThetaTable {
  int M = 1;
  std::vector<std::vector<double>> theta;
};

inline ThetaTable theta_table(int M) {
  ThetaTable t;
  t.M = M;
  if (M == 1) {
    t.theta = {{0.0, 0.0}, {0.5, 0.5}};
  } else if (M == 2) {
    t.theta = {{0.0, 0.0, 0.0}, {5.0 / 24.0, 8.0 / 24.0, -1.0 / 24.0}, {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0}};
  } else {
    throw ConfigError("DeC supports M = 1 or 2 sub-intervals");
  }
  return t;
}

/// Everything a residual evaluation needs besides the state.
struct Problem {
  const FESpace* space = nullptr;
  Gas gas;
  SchemeConfig scheme;
  CorrectionMode correction = CorrectionMode::off;
  CorrectionKernel kernel = CorrectionKernel::automatic;
  std::vector<BcKind> face_bc;  // one per mesh boundary face
  BoundaryData dirichlet;
  int threads = 1;

  std::size_t nface_dofs() const { return space->degree() == 2 ? 3 : 2; }
};

/// Spatial residuals at one state, kept in element/face-local form.
struct SpatialResidual {
  std::vector<State> elem;     // [k * nloc + s], scheme part without jumps
  std::vector<State> jump;     // [k * nloc + s]
  std::vector<double> gflux;   // oint_{dK} G.n per element, element frame
  std::vector<double> seam;    // periodic seam shift of gflux into the canonical frame
  std::vector<State> bnd;      // [f * nface + j]
  std::vector<double> bgflux;  // int_Gamma (G_hat - G).n per face
};

namespace detail {
inline void gather(const FESpace& sp, std::size_t k, std::span<const State> u, State* out) {
  const auto g = sp.dofs.dofs(k);
  for (std::size_t s = 0; s < g.size(); ++s) out[s] = u[static_cast<std::size_t>(g[s])];
}
}  // namespace detail

inline SpatialResidual spatial_residual(const Problem& P, std::span<const State> u) {
  const FESpace& sp = *P.space;
  const std::size_t nloc = sp.nloc(), ne = sp.mesh.size();
  SpatialResidual R;
  R.elem.assign(ne * nloc, State{});
  R.jump.assign(ne * nloc, State{});
  R.gflux.assign(ne, 0.0);
  R.seam.assign(ne, 0.0);
  parallel_for(P.threads, ne, [&](std::size_t k) {
    std::vector<State> loc(nloc);
    detail::gather(sp, k, u, loc.data());
    try {
      R.gflux[k] = element_residual(sp.ref, sp.elem[k], loc, P.scheme, P.gas,
                                    std::span<State>(&R.elem[k * nloc], nloc));
    } catch (const StateError& e) {
      throw StateError(e.what(), e.state(), static_cast<long>(k));
    }
  });
  if (uses_jumps(P.scheme.scheme) && P.scheme.theta_cip != 0.0) {
    const auto& edges = sp.mesh.interior_edges;
    std::vector<State> buf(edges.size() * 2 * nloc, State{});
    parallel_for(P.threads, edges.size(), [&](std::size_t i) {
      const auto& ie = edges[i];
      std::vector<State> uk(nloc), up(nloc);
      detail::gather(sp, static_cast<std::size_t>(ie.elem), u, uk.data());
      detail::gather(sp, static_cast<std::size_t>(ie.nb_elem), u, up.data());
      cip_edge(sp.ref, sp.elem[static_cast<std::size_t>(ie.elem)], sp.elem[static_cast<std::size_t>(ie.nb_elem)], ie,
               uk, up, P.scheme.theta_cip, std::span<State>(&buf[2 * i * nloc], nloc),
               std::span<State>(&buf[(2 * i + 1) * nloc], nloc));
    });
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t s = 0; s < nloc; ++s) {
        R.jump[static_cast<std::size_t>(edges[i].elem) * nloc + s] += buf[2 * i * nloc + s];
        R.jump[static_cast<std::size_t>(edges[i].nb_elem) * nloc + s] += buf[(2 * i + 1) * nloc + s];
      }
  }
  // Periodic seams: the neighbour's angular flux re-expressed in the owner's
  // frame, so that gflux + seam telescopes over the whole box.
  for (const auto& ie : sp.mesh.interior_edges) {
    if (!ie.periodic) continue;
    const auto ko = static_cast<std::size_t>(ie.elem), kn = static_cast<std::size_t>(ie.nb_elem);
    const auto [a0, b0] = sp.mesh.edge_vertices(ko, ie.edge);
    const auto [a1, b1] = sp.mesh.edge_vertices(kn, ie.nb_edge);
    const auto& v = sp.mesh.vertices;
    const Vec2 shift = 0.5 * ((v[static_cast<std::size_t>(a0)] + v[static_cast<std::size_t>(b0)]) -
                              (v[static_cast<std::size_t>(a1)] + v[static_cast<std::size_t>(b1)]));
    std::vector<State> loc(nloc);
    detail::gather(sp, kn, u, loc.data());
    const auto& d = sp.elem[kn];
    const std::size_t nqe = sp.ref.nq_edge();
    Vec2 mflux{};
    for (std::size_t q = 0; q < nqe; ++q) {
      const std::size_t eq = static_cast<std::size_t>(ie.nb_edge) * nqe + q;
      State uq{};
      for (std::size_t s = 0; s < nloc; ++s) uq += sp.ref.ephi[eq * nloc + s] * loc[s];
      mflux += d.ew[eq] * momentum(flux_n(uq, d.normal[static_cast<std::size_t>(ie.nb_edge)], P.gas));
    }
    R.seam[kn] += wedge(shift, mflux);
  }
  const auto& faces = sp.mesh.boundary_faces;
  const std::size_t nf = P.nface_dofs();
  R.bnd.assign(faces.size() * nf, State{});
  R.bgflux.assign(faces.size(), 0.0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto k = static_cast<std::size_t>(faces[f].elem);
    std::vector<State> loc(nloc), out(nloc, State{});
    detail::gather(sp, k, u, loc.data());
    R.bgflux[f] = boundary_residual(sp.ref, sp.elem[k], faces[f].edge, loc, P.face_bc.at(f), P.dirichlet, P.gas, out);
    const auto ld = edge_local_dofs(sp.ref, faces[f].edge);
    for (std::size_t j = 0; j < nf; ++j) R.bnd[f * nf + j] = out[static_cast<std::size_t>(ld[j])];
  }
  return R;
}

/// Per-DOF sum_K Phi_{s,x}^K + sum_Gamma Phi_{s,x}^Gamma.
inline std::vector<State> assemble_spatial(const Problem& P, const SpatialResidual& R) {
  const FESpace& sp = *P.space;
  const std::size_t nloc = sp.nloc();
  std::vector<State> out(sp.ndofs(), State{});
  for (std::size_t k = 0; k < sp.mesh.size(); ++k) {
    const auto g = sp.dofs.dofs(k);
    for (std::size_t s = 0; s < nloc; ++s) out[static_cast<std::size_t>(g[s])] += R.elem[k * nloc + s] + R.jump[k * nloc + s];
  }
  const std::size_t nf = P.nface_dofs();
  for (std::size_t f = 0; f < sp.mesh.boundary_faces.size(); ++f) {
    const auto& face = sp.mesh.boundary_faces[f];
    const auto g = sp.dofs.dofs(static_cast<std::size_t>(face.elem));
    const auto ld = edge_local_dofs(sp.ref, face.edge);
    for (std::size_t j = 0; j < nf; ++j) out[static_cast<std::size_t>(g[static_cast<std::size_t>(ld[j])])] += R.bnd[f * nf + j];
  }
  return out;
}

using Stack = std::vector<std::vector<State>>;  // U[l][dof], l = 0..M

/// [L1]_{s,(l)} = |C_s|(u_{s,(l)} - u_{s,(0)}) + (l/M) dt sum_K Phi_{s,x}(u_(0)).
inline Stack l1_apply(std::span<const double> c_sigma, const Stack& U, std::span<const State> phi0, double dt) {
  const std::size_t M = U.size() - 1;
  Stack out(U.size(), std::vector<State>(c_sigma.size(), State{}));
  for (std::size_t l = 1; l <= M; ++l)
    for (std::size_t i = 0; i < c_sigma.size(); ++i)
      out[l][i] = c_sigma[i] * (U[l][i] - U[0][i]) + (double(l) / double(M) * dt) * phi0[i];
  return out;
}

/// Anchors a_s and time weights W_s for the correction of element k. The
/// canonical frame uses the DOF positions of the dof map, so sum_K W_s^K =
/// |C_s| a_s holds across periodic seams; the local frame uses the element's
/// own geometry.
inline void correction_frame(const FESpace& sp, std::size_t k, CorrectionMode mode, std::vector<Vec2>& anchors,
                             std::vector<Vec2>& weights, bool local = false) {
  const auto& d = sp.elem[k];
  const auto& lm = sp.lumped;
  const auto g = sp.dofs.dofs(k);
  const std::size_t nloc = sp.nloc();
  anchors.resize(nloc);
  weights.resize(nloc);
  for (std::size_t s = 0; s < nloc; ++s) {
    const auto i = static_cast<std::size_t>(g[s]);
    const Vec2 shift = local ? Vec2{} : lm.x_sigma[i] - d.xdof[s];
    if (mode == CorrectionMode::second_order) {
      anchors[s] = d.xdof[s] + shift;
      weights[s] = d.bint[s] * anchors[s];
    } else {
      anchors[s] = d.anchor[s] + shift;
      weights[s] = d.zmom[s] + d.bint[s] * shift;
    }
  }
}

/// True if some DOF of element k has its canonical position in another
/// periodic image.
inline bool on_seam(const FESpace& sp, std::size_t k) {
  const auto g = sp.dofs.dofs(k);
  const double tol = 1e-9 * std::sqrt(sp.elem[k].area);
  for (std::size_t s = 0; s < g.size(); ++s)
    if (norm(sp.lumped.x_sigma[static_cast<std::size_t>(g[s])] - sp.elem[k].xdof[s]) > tol) return true;
  return false;
}

/// Automatic choice: the triangle closed form for B1 triangles with
/// second-order anchors, perp otherwise.
inline CorrectionKernel resolve_kernel(const Problem& P) {
  if (P.kernel != CorrectionKernel::automatic) return P.kernel;
  if (P.correction != CorrectionMode::second_order || P.space->nloc() != 3) return CorrectionKernel::perp;
  return CorrectionKernel::triangle;
}

/// [L2]_{(l)} for l = 1..M as per-DOF accumulated residuals (corrections
/// included). R[k] are the spatial residuals at U[k].
inline Stack l2_apply(const Problem& P, const Stack& U, const std::vector<const SpatialResidual*>& R, double dt,
                      const ThetaTable& th) {
  const FESpace& sp = *P.space;
  const std::size_t nloc = sp.nloc(), ne = sp.mesh.size(), M = U.size() - 1;
  const bool lumped = lumped_time(P.scheme.scheme);
  const bool psi = P.scheme.scheme == Scheme::psi_cip;
  const bool correct = P.correction != CorrectionMode::off;
  Stack out(M + 1, std::vector<State>(sp.ndofs(), State{}));
  std::vector<State> loc(ne * nloc);
  // Seam elements balance J in their own frame; their combined defect in the
  // canonical frame is handed to the other elements in proportion to area.
  std::vector<std::size_t> seam, inner;
  double inner_area = 0.0;
  for (std::size_t k = 0; k < ne; ++k) {
    if (correct && on_seam(sp, k)) {
      seam.push_back(k);
    } else {
      inner.push_back(k);
      inner_area += sp.elem[k].area;
    }
  }
  const CorrectionKernel kernel = resolve_kernel(P);
  std::vector<double> defect(seam.size(), 0.0);
  for (std::size_t l = 1; l <= M; ++l) {
    const auto& w = th.theta[l];
    auto element = [&](std::size_t k, bool local, double shift) {
      const auto& d = sp.elem[k];
      const auto g = sp.dofs.dofs(k);
      std::span<State> res(&loc[k * nloc], nloc);
      std::vector<State> du(nloc);
      for (std::size_t s = 0; s < nloc; ++s) du[s] = U[l][static_cast<std::size_t>(g[s])] - U[0][static_cast<std::size_t>(g[s])];
      for (std::size_t s = 0; s < nloc; ++s) {
        State r{};
        if (lumped) {
          r = d.bint[s] * du[s];
        } else {
          for (std::size_t t = 0; t < nloc; ++t) r += d.mass[s * nloc + t] * du[t];
        }
        for (std::size_t kk = 0; kk <= M; ++kk) r += (dt * w[kk]) * R[kk]->elem[k * nloc + s];
        res[s] = r;
      }
      if (psi) {
        State mean{};
        for (std::size_t s = 0; s < nloc; ++s) mean += U[l][static_cast<std::size_t>(g[s])];
        mean *= 1.0 / static_cast<double>(nloc);
        try {
          psi_limit(res, mean, P.scheme, P.gas);
        } catch (const StateError& e) {
          throw StateError(e.what(), e.state(), static_cast<long>(k));
        }
      }
      for (std::size_t s = 0; s < nloc; ++s)
        for (std::size_t kk = 0; kk <= M; ++kk) res[s] += (dt * w[kk]) * R[kk]->jump[k * nloc + s];
      if (!correct) return 0.0;
      std::vector<Vec2> anchors, weights, dm(nloc);
      correction_frame(sp, k, P.correction, anchors, weights, local);
      for (std::size_t s = 0; s < nloc; ++s) dm[s] = momentum(du[s]);
      double flux = 0.0, seam_flux = 0.0;
      for (std::size_t kk = 0; kk <= M; ++kk) {
        flux += dt * w[kk] * R[kk]->gflux[k];
        seam_flux += dt * w[kk] * R[kk]->seam[k];
      }
      correct_residuals(kernel, anchors, weights, dm, local ? flux : flux + seam_flux - shift, res);
      if (!local) return 0.0;
      correction_frame(sp, k, P.correction, anchors, weights);
      return -target_psi(anchors, weights, dm, flux + seam_flux, std::span<const State>(res.data(), nloc));
    };
    parallel_for(P.threads, seam.size(), [&](std::size_t i) { defect[i] = element(seam[i], true, 0.0); });
    double total = 0.0;
    for (double x : defect) total += x;
    const double per_area = inner_area > 0.0 ? total / inner_area : 0.0;
    parallel_for(P.threads, inner.size(), [&](std::size_t i) {
      element(inner[i], false, per_area * sp.elem[inner[i]].area);
    });
    auto& acc = out[l];
    for (std::size_t k = 0; k < ne; ++k) {
      const auto g = sp.dofs.dofs(k);
      for (std::size_t s = 0; s < nloc; ++s) acc[static_cast<std::size_t>(g[s])] += loc[k * nloc + s];
    }
    const auto& faces = sp.mesh.boundary_faces;
    const std::size_t nf = P.nface_dofs();
    std::vector<State> fres(nf);
    std::vector<Vec2> fanch(nf), anchors, weights;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (P.face_bc[f] == BcKind::gradient_free) continue;
      const auto k = static_cast<std::size_t>(faces[f].elem);
      const auto ld = edge_local_dofs(sp.ref, faces[f].edge);
      double phij = 0.0;
      for (std::size_t j = 0; j < nf; ++j) {
        fres[j] = State{};
        for (std::size_t kk = 0; kk <= M; ++kk) fres[j] += (dt * w[kk]) * R[kk]->bnd[f * nf + j];
      }
      if (correct) {
        for (std::size_t kk = 0; kk <= M; ++kk) phij += dt * w[kk] * R[kk]->bgflux[f];
        correction_frame(sp, k, P.correction, anchors, weights);
        for (std::size_t j = 0; j < nf; ++j) fanch[j] = anchors[static_cast<std::size_t>(ld[j])];
        correct_residuals(CorrectionKernel::perp, fanch, {}, {}, phij, fres);
      }
      const auto g = sp.dofs.dofs(k);
      for (std::size_t j = 0; j < nf; ++j) acc[static_cast<std::size_t>(g[static_cast<std::size_t>(ld[j])])] += fres[j];
    }
  }
  return out;
}

struct DecStats {
  std::vector<double> defect;  // ||L2(U^(p))||, p = 0..iters
};

/// One time step u^n -> u^{n+1}. Throws StepFailure on an inadmissible
/// iterate. With `stats`, one extra L2 evaluation records the final defect.
inline void dec_step(const Problem& P, std::vector<State>& u, double dt, int M, int iters, DecStats* stats = nullptr) {
  if (iters < 1) throw ConfigError("DeC needs at least one iteration");
  const ThetaTable th = theta_table(M);
  const auto Mz = static_cast<std::size_t>(M);
  const auto& c = P.space->lumped.c_sigma;
  Stack U(Mz + 1, u);
  const SpatialResidual R0 = spatial_residual(P, u);
  std::vector<SpatialResidual> Rk(Mz + 1);
  const int passes = stats ? iters + 1 : iters;
  for (int p = 0; p < passes; ++p) {
    std::vector<const SpatialResidual*> R(Mz + 1, &R0);
    if (p > 0)
      for (std::size_t k = 1; k <= Mz; ++k) {
        try {
          Rk[k] = spatial_residual(P, U[k]);
        } catch (const StateError& e) {
          throw StepFailure(std::string("residual evaluation failed: ") + e.what(), p, e.element());
        }
        R[k] = &Rk[k];
      }
    Stack L2;
    try {
      L2 = l2_apply(P, U, R, dt, th);
    } catch (const StateError& e) {
      throw StepFailure(std::string("residual evaluation failed: ") + e.what(), p, e.element());
    }
    if (stats) {
      double s = 0.0;
      for (std::size_t l = 1; l <= Mz; ++l)
        for (std::size_t i = 0; i < c.size(); ++i) {
          // the L2 defect is |C_s| (u_l - u_0)-shaped; compare in state units
          const State v = (1.0 / c[i]) * L2[l][i];
          for (double x : v) s += c[i] * x * x;
        }
      stats->defect.push_back(std::sqrt(s));
      if (p == iters) break;
    }
    for (std::size_t l = 1; l <= Mz; ++l)
      for (std::size_t i = 0; i < c.size(); ++i) {
        U[l][i] -= (1.0 / c[i]) * L2[l][i];
        if (!admissible(U[l][i], P.gas))
          throw StepFailure("inadmissible state after DeC iteration " + std::to_string(p + 1), p + 1,
                            static_cast<long>(i));
      }
  }
  u = U[Mz];
}

/// dt = cfl min_K h_K / lambda_K, divided by (2 degree - 1).
inline double compute_dt(const FESpace& sp, std::span<const State> u, double cfl, const Gas& gas,
                         double dt_max = 1e300) {
  double dt = dt_max;
  for (std::size_t k = 0; k < sp.mesh.size(); ++k) {
    const auto g = sp.dofs.dofs(k);
    double lambda = 0.0;
    for (int gi : g) lambda = std::max(lambda, spectral_radius(u[static_cast<std::size_t>(gi)], gas));
    if (lambda > 0.0) dt = std::min(dt, cfl * sp.elem[k].h / lambda);
  }
  return dt / (2.0 * sp.degree() - 1.0);
}

}  // namespace amrd
