#pragma once

// Ideal-gas Euler algebra in conservative variables (rho, m_x, m_y, E).

#include <array>
#include <cmath>
#include <string>

#include "amrd/core.hpp"

namespace amrd {

struct Gas {
  double gamma = 1.4;
};

struct Primitive {
  double rho = 1.0;
  Vec2 v;
  double p = 1.0;
};

using Matrix4 = std::array<std::array<double, 4>, 4>;

inline State operator*(const Matrix4& a, const State& x) {
  State y{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline bool admissible(const State& u, const Gas& gas) {
  for (double c : u)
    if (!std::isfinite(c)) return false;
  if (!(u[0] > 0.0)) return false;
  const double e = u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0];
  return (gas.gamma - 1.0) * e > 0.0;
}

inline double pressure(const State& u, const Gas& gas) {
  if (!admissible(u, gas)) throw StateError("inadmissible state (rho <= 0, p <= 0 or non-finite)", u);
  return (gas.gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
}

inline double sound_speed(const State& u, const Gas& gas) {
  return std::sqrt(gas.gamma * pressure(u, gas) / u[0]);
}

inline State to_conservative(const Primitive& w, const Gas& gas) {
  return {w.rho, w.rho * w.v.x, w.rho * w.v.y,
          w.p / (gas.gamma - 1.0) + 0.5 * w.rho * dot(w.v, w.v)};
}

inline Primitive to_primitive(const State& u, const Gas& gas) {
  const double p = pressure(u, gas);
  return {u[0], {u[1] / u[0], u[2] / u[0]}, p};
}

/// Physical fluxes (f1, f2).
inline std::array<State, 2> flux(const State& u, const Gas& gas) {
  const double p = pressure(u, gas);
  const double vx = u[1] / u[0], vy = u[2] / u[0];
  return {State{u[1], u[1] * vx + p, u[1] * vy, (u[3] + p) * vx},
          State{u[2], u[2] * vx, u[2] * vy + p, (u[3] + p) * vy}};
}

/// f(u) . n
inline State flux_n(const State& u, const Vec2& n, const Gas& gas) {
  const double p = pressure(u, gas);
  const double vn = (u[1] * n.x + u[2] * n.y) / u[0];
  return {u[0] * vn, u[1] * vn + p * n.x, u[2] * vn + p * n.y, (u[3] + p) * vn};
}

/// Angular-momentum flux G_i = x ^ (momentum block of f_i).
inline Vec2 angular_flux(const State& u, const Vec2& x, const Gas& gas) {
  const auto f = flux(u, gas);
  return {x.x * f[0][2] - x.y * f[0][1], x.x * f[1][2] - x.y * f[1][1]};
}

/// G . n for a momentum-flux 4-vector already contracted with n.
inline double angular_flux_n(const State& fn, const Vec2& x) { return wedge(x, momentum(fn)); }

/// 3D counterpart, pointwise only: state (rho, m, E), returns G_i = x x (f_i)_m
/// for i = 1..3.
inline std::array<Vec3, 3> angular_flux_3d(double rho, const Vec3& m, double E, const Vec3& x,
                                           const Gas& gas) {
  const double p = (gas.gamma - 1.0) * (E - 0.5 * dot(m, m) / rho);
  if (!(rho > 0.0) || !(p > 0.0)) throw StateError("inadmissible 3D state", State{rho, m.x, m.y, E});
  const Vec3 v = (1.0 / rho) * m;
  const std::array<double, 3> vc{v.x, v.y, v.z};
  std::array<Vec3, 3> g{};
  for (int i = 0; i < 3; ++i) {
    Vec3 col = vc[i] * m;  // momentum block of f_i: rho v_i v + p e_i
    (i == 0 ? col.x : i == 1 ? col.y : col.z) += p;
    g[i] = cross(x, col);
  }
  return g;
}

inline double max_wavespeed(const State& u, const Vec2& n, const Gas& gas) {
  return std::abs((u[1] * n.x + u[2] * n.y) / u[0]) + sound_speed(u, gas);
}

/// |v| + c, the direction-free bound.
inline double spectral_radius(const State& u, const Gas& gas) {
  return std::hypot(u[1], u[2]) / u[0] + sound_speed(u, gas);
}

/// Two-state Rusanov flux with the larger of the two normal wave speeds.
inline State rusanov_flux(const State& ul, const State& ur, const Vec2& n, const Gas& gas) {
  const double a = std::max(max_wavespeed(ul, n, gas), max_wavespeed(ur, n, gas));
  return 0.5 * (flux_n(ul, n, gas) + flux_n(ur, n, gas)) - (0.5 * a) * (ur - ul);
}

enum class BcKind { wall, dirichlet, gradient_free };

inline BcKind parse_bc_kind(const std::string& s) {
  if (s == "wall") return BcKind::wall;
  if (s == "dirichlet") return BcKind::dirichlet;
  if (s == "gradient_free" || s == "gradient-free") return BcKind::gradient_free;
  throw ConfigError("unknown boundary condition kind '" + s + "'");
}

inline std::string to_string(BcKind k) {
  switch (k) {
    case BcKind::wall: return "wall";
    case BcKind::dirichlet: return "dirichlet";
    case BcKind::gradient_free: return "gradient_free";
  }
  return "?";
}

inline State mirror_state(const State& u, const Vec2& n) {
  const double mn = u[1] * n.x + u[2] * n.y;
  return {u[0], u[1] - 2.0 * mn * n.x, u[2] - 2.0 * mn * n.y, u[3]};
}

/// Numerical boundary flux F_n(u_in, g). `g` is only read for Dirichlet.
inline State boundary_numflux(const State& u_in, const State& g, const Vec2& n, BcKind kind,
                              const Gas& gas) {
  switch (kind) {
    case BcKind::wall: return rusanov_flux(u_in, mirror_state(u_in, n), n, gas);
    case BcKind::dirichlet: return rusanov_flux(u_in, g, n, gas);
    case BcKind::gradient_free: return flux_n(u_in, n, gas);
  }
  throw ConfigError("unknown boundary condition kind");
}

/// d(f.n)/du.
inline Matrix4 jacobian_n(const State& u, const Vec2& n, const Gas& gas) {
  const double g = gas.gamma;
  const double vx = u[1] / u[0], vy = u[2] / u[0];
  const double vn = vx * n.x + vy * n.y;
  const double phi2 = 0.5 * (g - 1.0) * (vx * vx + vy * vy);
  const double H = (u[3] + pressure(u, gas)) / u[0];
  Matrix4 a{};
  a[0] = {0.0, n.x, n.y, 0.0};
  a[1] = {n.x * phi2 - vx * vn, vn - (g - 2.0) * vx * n.x, vx * n.y - (g - 1.0) * vy * n.x, (g - 1.0) * n.x};
  a[2] = {n.y * phi2 - vy * vn, vy * n.x - (g - 1.0) * vx * n.y, vn - (g - 2.0) * vy * n.y, (g - 1.0) * n.y};
  a[3] = {vn * (phi2 - H), H * n.x - (g - 1.0) * vx * vn, H * n.y - (g - 1.0) * vy * vn, g * vn};
  return a;
}

/// Eigenstructure of jacobian_n for unit n. Columns of R are right
/// eigenvectors, rows of L left eigenvectors, L R = I. Wave order:
/// vn - c, vn (entropy), vn (shear), vn + c.
struct Eigensystem {
  std::array<State, 4> R;
  std::array<State, 4> L;
  State lambda;
};

inline Eigensystem eigensystem(const State& u, const Vec2& n, const Gas& gas) {
  if (!admissible(u, gas)) throw StateError("eigensystem of inadmissible mean state", u);
  const double g = gas.gamma;
  const double vx = u[1] / u[0], vy = u[2] / u[0];
  const double c = sound_speed(u, gas);
  const double H = (u[3] + pressure(u, gas)) / u[0];
  const Vec2 t{-n.y, n.x};
  const double vn = vx * n.x + vy * n.y, vt = vx * t.x + vy * t.y;
  const double q2 = vx * vx + vy * vy;
  const double b1 = (g - 1.0) / (c * c), b2 = 0.5 * b1 * q2;
  Eigensystem e;
  e.lambda = {vn - c, vn, vn, vn + c};
  e.R[0] = {1.0, vx - c * n.x, vy - c * n.y, H - c * vn};
  e.R[1] = {1.0, vx, vy, 0.5 * q2};
  e.R[2] = {0.0, t.x, t.y, vt};
  e.R[3] = {1.0, vx + c * n.x, vy + c * n.y, H + c * vn};
  e.L[0] = 0.5 * State{b2 + vn / c, -b1 * vx - n.x / c, -b1 * vy - n.y / c, b1};
  e.L[1] = {1.0 - b2, b1 * vx, b1 * vy, -b1};
  e.L[2] = {-vt, t.x, t.y, 0.0};
  e.L[3] = 0.5 * State{b2 - vn / c, -b1 * vx + n.x / c, -b1 * vy + n.y / c, b1};
  return e;
}

}  // namespace amrd
