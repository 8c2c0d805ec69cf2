#pragma once

// Initial data and reference fields for the benchmark problems.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "amrd/core.hpp"
#include "amrd/euler_physics.hpp"
#include "amrd/fe_space.hpp"

namespace amrd {

struct VortexParams {
  double beta = 5.0;
  double gamma = 1.4;
  Vec2 center{};
  Vec2 free_stream{1.0, 0.0};
};

namespace detail {
inline double vortex_density(double beta, double gamma, double r2) {
  const double base = 1.0 - (gamma - 1.0) * beta * beta / (8.0 * gamma * std::numbers::pi * std::numbers::pi) *
                                std::exp(1.0 - r2);
  return std::pow(base, 1.0 / (gamma - 1.0));
}
inline void check_vortex_beta(double beta, double gamma) {
  const double base = 1.0 - (gamma - 1.0) * beta * beta / (8.0 * gamma * std::numbers::pi * std::numbers::pi) * std::numbers::e;
  if (!(base > 0.0)) throw ConfigError("vortex strength beta gives non-positive core density");
}
}  // namespace detail

inline Primitive isentropic_vortex(const Vec2& x, const VortexParams& vp) {
  detail::check_vortex_beta(vp.beta, vp.gamma);
  const Vec2 d = x - vp.center;
  const double r2 = dot(d, d);
  const double rho = detail::vortex_density(vp.beta, vp.gamma, r2);
  const double a = vp.beta / (2.0 * std::numbers::pi) * std::exp(0.5 * (1.0 - r2));
  return {rho, {vp.free_stream.x - a * d.y, vp.free_stream.y + a * d.x}, std::pow(rho, vp.gamma)};
}

/// Vortex advected with the free stream on a periodic box of size `period`;
/// the nearest periodic image of the centre is used.
inline Primitive vortex_exact(const Vec2& x, double t, const VortexParams& vp, const Vec2& period) {
  Vec2 d = x - (vp.center + t * vp.free_stream);
  if (period.x > 0) d.x -= period.x * std::round(d.x / period.x);
  if (period.y > 0) d.y -= period.y * std::round(d.y / period.y);
  VortexParams at = vp;
  at.center = {};
  return isentropic_vortex(d, at);
}

inline constexpr std::array<Vec2, 4> kFourVortexCenters{{{2.5, 2.5}, {-2.5, 2.5}, {-2.5, -2.5}, {2.5, -2.5}}};

/// Four vortices at C1..C4, one per quadrant; velocities use offsets from the
/// quadrant's centre, with the rotation sense flipped where xy < 0.
inline Primitive four_vortex(const Vec2& x, double beta, double gamma = 1.4) {
  detail::check_vortex_beta(beta, gamma);
  const int q = x.x >= 0 ? (x.y >= 0 ? 0 : 3) : (x.y >= 0 ? 1 : 2);
  const Vec2 d = x - kFourVortexCenters[static_cast<std::size_t>(q)];
  const double r2 = dot(d, d);
  const double rho = detail::vortex_density(beta, gamma, r2);
  const double a = beta / (2.0 * std::numbers::pi) * std::exp(0.5 * (1.0 - r2));
  const double sign = x.x * x.y >= 0 ? 1.0 : -1.0;
  return {rho, {-sign * a * d.y, sign * a * d.x}, std::pow(rho, gamma)};
}

inline double gresho_vphi(double r) {
  if (r < 0.2) return 5.0 * r;
  if (r < 0.4) return 2.0 - 5.0 * r;
  return 0.0;
}

inline double gresho_pressure(double r) {
  if (r < 0.2) return 5.0 + 12.5 * r * r;
  if (r < 0.4) return 9.0 - 4.0 * std::log(0.2) + 12.5 * r * r - 20.0 * r + 4.0 * std::log(r);
  return 3.0 + 4.0 * std::log(2.0);
}

inline double gresho_J(double r) {
  if (r < 0.2) return 5.0 * r * r;
  if (r < 0.4) return 2.0 * r - 5.0 * r * r;
  return 0.0;
}

inline Primitive gresho(const Vec2& x, const Vec2& center = {}) {
  const Vec2 d = x - center;
  const double r = norm(d);
  const double vphi = gresho_vphi(r);
  const Vec2 v = r > 0 ? (vphi / r) * Vec2{-d.y, d.x} : Vec2{};
  return {1.0, v, gresho_pressure(r)};
}

inline Primitive sod2d(const Vec2& x) {
  if (norm(x) <= 0.5) return {1.0, {}, 1.0};
  return {0.125, {}, 0.1};
}

using InitialData = std::function<Primitive(const Vec2&)>;

/// DOF values for initial data. Vertex DOFs take point values. For B2,
/// smooth data is interpolated at the edge midpoints
/// (u_ab = 2 u(mid) - (u_a + u_b)/2); discontinuous data takes Greville
/// point values so control values stay admissible.
inline std::vector<State> project_initial(const FESpace& sp, const InitialData& f, const Gas& gas, bool smooth) {
  std::vector<State> u(sp.ndofs());
  std::vector<char> done(sp.ndofs(), 0);
  const auto nloc = sp.nloc();
  for (std::size_t k = 0; k < sp.mesh.size(); ++k) {
    const auto g = sp.dofs.dofs(k);
    const auto& xd = sp.elem[k].xdof;
    for (std::size_t s = 0; s < nloc; ++s) {
      const auto i = static_cast<std::size_t>(g[s]);
      if (done[i]) continue;
      done[i] = 1;
      const State at = to_conservative(f(xd[s]), gas);
      if (s < 3 || !smooth || sp.degree() == 1) {
        u[i] = at;
        continue;
      }
      const auto& pr = kTriangleEdgeDofVertices[s - 3];
      const State ua = to_conservative(f(xd[static_cast<std::size_t>(pr[0])]), gas);
      const State ub = to_conservative(f(xd[static_cast<std::size_t>(pr[1])]), gas);
      u[i] = 2.0 * at - 0.5 * (ua + ub);
    }
  }
  return u;
}

}  // namespace amrd
