#pragma once

// Spatial residuals Phi_{s,x}^K and Phi_{s,x}^Gamma: Galerkin, CiP edge
// jumps, SUPG, Rusanov, PSI limiting and weak boundary conditions.

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "amrd/core.hpp"
#include "amrd/euler_physics.hpp"
#include "amrd/fe_space.hpp"

namespace amrd {

enum class Scheme { galerkin_cip, supg, rusanov, psi_cip };

inline Scheme parse_scheme(const std::string& s) {
  if (s == "galerkin_cip") return Scheme::galerkin_cip;
  if (s == "supg") return Scheme::supg;
  if (s == "rusanov") return Scheme::rusanov;
  if (s == "psi_cip" || s == "psi") return Scheme::psi_cip;
  throw ConfigError("unknown scheme '" + s + "'");
}

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::galerkin_cip: return "galerkin_cip";
    case Scheme::supg: return "supg";
    case Scheme::rusanov: return "rusanov";
    case Scheme::psi_cip: return "psi_cip";
  }
  return "?";
}

struct SchemeConfig {
  Scheme scheme = Scheme::galerkin_cip;
  double theta_cip = 0.1;
  double tau_supg = 0.5;
  double velocity_floor = 1e-8;
};

inline bool uses_jumps(Scheme s) { return s == Scheme::galerkin_cip || s == Scheme::psi_cip; }
inline bool lumped_time(Scheme s) { return s == Scheme::rusanov || s == Scheme::psi_cip; }

namespace detail {
inline State interpolate(const double* phi, std::span<const State> u) {
  State r{};
  for (std::size_t s = 0; s < u.size(); ++s) r += phi[s] * u[s];
  return r;
}
inline void gradient(const Vec2* grad, std::span<const State> u, State& ux, State& uy) {
  ux = {};
  uy = {};
  for (std::size_t s = 0; s < u.size(); ++s) {
    ux += grad[s].x * u[s];
    uy += grad[s].y * u[s];
  }
}
}  // namespace detail

/// Galerkin residual sum_e int phi_s f.n - int grad phi_s . f, accumulated
/// into `out`. Returns the element's angular-momentum boundary flux
/// oint G(u).n computed on the same edge quadrature.
inline double galerkin_residual(const ReferenceElement& r, const ElementData& d, std::span<const State> u,
                                const Gas& gas, std::span<State> out) {
  const std::size_t nloc = u.size();
  for (std::size_t q = 0; q < r.nq(); ++q) {
    const State uq = detail::interpolate(&r.phi[q * nloc], u);
    const auto f = flux(uq, gas);
    for (std::size_t s = 0; s < nloc; ++s) {
      const Vec2 g = d.grad[q * nloc + s];
      out[s] -= d.w[q] * (g.x * f[0] + g.y * f[1]);
    }
  }
  double gflux = 0.0;
  const std::size_t nqe = r.nq_edge();
  for (std::size_t e = 0; e < static_cast<std::size_t>(r.nvert); ++e)
    for (std::size_t q = 0; q < nqe; ++q) {
      const std::size_t eq = e * nqe + q;
      const State fn = flux_n(detail::interpolate(&r.ephi[eq * nloc], u), d.normal[e], gas);
      for (std::size_t s = 0; s < nloc; ++s) out[s] += (d.ew[eq] * r.ephi[eq * nloc + s]) * fn;
      gflux += d.ew[eq] * angular_flux_n(fn, d.ex[eq]);
    }
  return gflux;
}

/// Streamline term h_K int (A.grad phi_s) (tau/lambda_K) (A.grad u).
inline void supg_term(const ReferenceElement& r, const ElementData& d, std::span<const State> u, double tau,
                      const Gas& gas, std::span<State> out) {
  if (tau == 0.0) return;
  const std::size_t nloc = u.size();
  double lambda = 0.0;
  for (const auto& us : u) lambda = std::max(lambda, spectral_radius(us, gas));
  const double scale = d.h * tau / lambda;
  for (std::size_t q = 0; q < r.nq(); ++q) {
    const State uq = detail::interpolate(&r.phi[q * nloc], u);
    State ux, uy;
    detail::gradient(&d.grad[q * nloc], u, ux, uy);
    const Matrix4 A = jacobian_n(uq, {1.0, 0.0}, gas);
    const Matrix4 B = jacobian_n(uq, {0.0, 1.0}, gas);
    const State div = A * ux + B * uy;
    const State Ad = A * div, Bd = B * div;
    for (std::size_t s = 0; s < nloc; ++s) {
      const Vec2 g = d.grad[q * nloc + s];
      out[s] += (scale * d.w[q]) * (g.x * Ad + g.y * Bd);
    }
  }
}

/// alpha_K = max_s (|v|+c)(u_s) * max_{s,s'} |int phi_s grad phi_s'|.
inline double rusanov_alpha(const ElementData& d, std::span<const State> u, const Gas& gas) {
  double lambda = 0.0;
  for (const auto& us : u) lambda = std::max(lambda, spectral_radius(us, gas));
  return lambda * d.phigrad_max;
}

/// Dissipation (alpha_K/#s)(u_s - ubar).
inline void rusanov_term(const ElementData& d, std::span<const State> u, const Gas& gas, std::span<State> out) {
  const double n = static_cast<double>(u.size());
  State mean{};
  for (const auto& us : u) mean += us;
  mean *= 1.0 / n;
  const double a = rusanov_alpha(d, u, gas) / n;
  for (std::size_t s = 0; s < u.size(); ++s) out[s] += a * (u[s] - mean);
}

/// Element part of the spatial residual for the configured scheme (jump
/// terms excluded). Returns oint G.n.
inline double element_residual(const ReferenceElement& r, const ElementData& d, std::span<const State> u,
                               const SchemeConfig& cfg, const Gas& gas, std::span<State> out) {
  const double g = galerkin_residual(r, d, u, gas, out);
  if (cfg.scheme == Scheme::supg) supg_term(r, d, u, cfg.tau_supg, gas, out);
  if (cfg.scheme == Scheme::rusanov || cfg.scheme == Scheme::psi_cip) rusanov_term(d, u, gas, out);
  return g;
}

/// CiP contribution of one interior edge: theta h_e^2 int [grad u].grad phi_s,
/// the K part going to `outK` and the K+ part (with opposite sign) to `outP`.
/// Each part sums to zero over its element's DOFs.
inline void cip_edge(const ReferenceElement& r, const ElementData& dK, const ElementData& dP, const InteriorEdge& ie,
                     std::span<const State> uK, std::span<const State> uP, double theta, std::span<State> outK,
                     std::span<State> outP) {
  const std::size_t nloc = uK.size(), nqe = r.nq_edge();
  const auto eK = static_cast<std::size_t>(ie.edge), eP = static_cast<std::size_t>(ie.nb_edge);
  const double he = dK.length[eK];
  const double c = theta * he * he;
  for (std::size_t q = 0; q < nqe; ++q) {
    const std::size_t qK = eK * nqe + q;
    const std::size_t qP = eP * nqe + (ie.reversed ? nqe - 1 - q : q);
    State kx, ky, px, py;
    detail::gradient(&dK.egrad[qK * nloc], uK, kx, ky);
    detail::gradient(&dP.egrad[qP * nloc], uP, px, py);
    const State jx = kx - px, jy = ky - py;
    const double w = c * dK.ew[qK];
    for (std::size_t s = 0; s < nloc; ++s) {
      const Vec2 gk = dK.egrad[qK * nloc + s];
      const Vec2 gp = dP.egrad[qP * nloc + s];
      outK[s] += w * (gk.x * jx + gk.y * jy);
      outP[s] -= w * (gp.x * jx + gp.y * jy);
    }
  }
}

/// PSI limiting in place. Characteristic components Psi_s^i = L_i Phi_s of
/// T_d, d = vbar/|vbar| (or (1,0) below the velocity floor), are redistributed
/// with beta_s^i = max(Psi_s^i/Psi^i, 0)/sum_s' max(Psi_s'^i/Psi^i, 0).
/// Families with Psi^i = 0 pass through.
inline void psi_limit(std::span<State> phi, const State& ubar, const SchemeConfig& cfg, const Gas& gas) {
  const Vec2 v{ubar[1] / ubar[0], ubar[2] / ubar[0]};
  const double vn = norm(v);
  const Vec2 dir = vn >= cfg.velocity_floor && vn > 0.0 ? (1.0 / vn) * v : Vec2{1.0, 0.0};
  const Eigensystem es = eigensystem(ubar, dir, gas);
  const std::size_t n = phi.size();
  std::vector<State> psi(n);
  State total{};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < 4; ++i) {
      double c = 0.0;
      for (std::size_t j = 0; j < 4; ++j) c += es.L[i][j] * phi[s][j];
      psi[s][i] = c;
      total[i] += c;
    }
  for (std::size_t i = 0; i < 4; ++i) {
    if (total[i] == 0.0) continue;
    double denom = 0.0;
    for (std::size_t s = 0; s < n; ++s) denom += std::max(psi[s][i] / total[i], 0.0);
    for (std::size_t s = 0; s < n; ++s) psi[s][i] = std::max(psi[s][i] / total[i], 0.0) / denom * total[i];
  }
  for (std::size_t s = 0; s < n; ++s) {
    State out{};
    for (std::size_t i = 0; i < 4; ++i) out += psi[s][i] * es.R[i];
    phi[s] = out;
  }
}

using BoundaryData = std::function<State(const Vec2&)>;

/// int_Gamma phi_s (F_n(u, g) - f(u).n) on local edge `e`. Returns
/// int_Gamma (G_hat - G(u)).n with G_hat = x ^ (momentum block of F_n).
inline double boundary_residual(const ReferenceElement& r, const ElementData& d, int e, std::span<const State> u,
                                BcKind kind, const BoundaryData& g, const Gas& gas, std::span<State> out) {
  if (kind == BcKind::gradient_free) return 0.0;
  const std::size_t nloc = u.size(), nqe = r.nq_edge();
  const auto ee = static_cast<std::size_t>(e);
  double gflux = 0.0;
  for (std::size_t q = 0; q < nqe; ++q) {
    const std::size_t eq = ee * nqe + q;
    const State uq = detail::interpolate(&r.ephi[eq * nloc], u);
    const Vec2 n = d.normal[ee];
    const State gq = kind == BcKind::dirichlet ? g(d.ex[eq]) : State{};
    const State diff = boundary_numflux(uq, gq, n, kind, gas) - flux_n(uq, n, gas);
    for (std::size_t s = 0; s < nloc; ++s) out[s] += (d.ew[eq] * r.ephi[eq * nloc + s]) * diff;
    gflux += d.ew[eq] * angular_flux_n(diff, d.ex[eq]);
  }
  return gflux;
}

/// Local DOFs (indices into the element's DOF list) carried by local edge e:
/// its two vertices and, for B2 triangles, the edge DOF.
inline std::vector<int> edge_local_dofs(const ReferenceElement& r, int e) {
  std::vector<int> out{e, (e + 1) % r.nvert};
  if (r.degree == 2) {
    const int a = std::min(out[0], out[1]), b = std::max(out[0], out[1]);
    for (int i = 0; i < 3; ++i)
      if (kTriangleEdgeDofVertices[static_cast<std::size_t>(i)][0] == a &&
          kTriangleEdgeDofVertices[static_cast<std::size_t>(i)][1] == b)
        out.push_back(3 + i);
  }
  return out;
}

/// Full Galerkin-CiP residual of element k, with the jump terms of all its
/// interior edges, for a global state field `u` (per DOF).
inline std::vector<State> galerkin_cip_residual(const FESpace& sp, std::size_t k, std::span<const State> u,
                                                const SchemeConfig& cfg, const Gas& gas) {
  const std::size_t nloc = sp.nloc();
  auto gather = [&](std::size_t e) {
    std::vector<State> loc(nloc);
    const auto g = sp.dofs.dofs(e);
    for (std::size_t s = 0; s < nloc; ++s) loc[s] = u[static_cast<std::size_t>(g[s])];
    return loc;
  };
  const auto uk = gather(k);
  std::vector<State> out(nloc, State{});
  galerkin_residual(sp.ref, sp.elem[k], uk, gas, out);
  std::vector<State> sink(nloc);
  for (const auto& ie : sp.mesh.interior_edges) {
    if (static_cast<std::size_t>(ie.elem) == k) {
      const auto up = gather(static_cast<std::size_t>(ie.nb_elem));
      cip_edge(sp.ref, sp.elem[k], sp.elem[static_cast<std::size_t>(ie.nb_elem)], ie, uk, up, cfg.theta_cip, out,
               sink);
    } else if (static_cast<std::size_t>(ie.nb_elem) == k) {
      const auto up = gather(static_cast<std::size_t>(ie.elem));
      cip_edge(sp.ref, sp.elem[static_cast<std::size_t>(ie.elem)], sp.elem[k], ie, up, uk, cfg.theta_cip, sink,
               out);
    }
  }
  return out;
}

inline std::vector<State> supg_residual(const ReferenceElement& r, const ElementData& d, std::span<const State> u,
                                        const SchemeConfig& cfg, const Gas& gas) {
  std::vector<State> out(u.size(), State{});
  galerkin_residual(r, d, u, gas, out);
  supg_term(r, d, u, cfg.tau_supg, gas, out);
  return out;
}

inline std::vector<State> rusanov_residual(const ReferenceElement& r, const ElementData& d,
                                           std::span<const State> u, const Gas& gas) {
  std::vector<State> out(u.size(), State{});
  galerkin_residual(r, d, u, gas, out);
  rusanov_term(d, u, gas, out);
  return out;
}

}  // namespace amrd
