#pragma once

// Angular-momentum correction: per-element (and per-boundary-face) defect
// Psi and zero-sum momentum perturbations r_s with sum_s a_s ^ r_s = Psi.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "amrd/core.hpp"

namespace amrd {

enum class CorrectionMode { off, second_order, high_order };

inline CorrectionMode parse_correction(const std::string& s) {
  if (s == "off" || s == "none") return CorrectionMode::off;
  if (s == "second_order") return CorrectionMode::second_order;
  if (s == "high_order") return CorrectionMode::high_order;
  throw ConfigError("unknown correction mode '" + s + "'");
}

inline std::string to_string(CorrectionMode m) {
  switch (m) {
    case CorrectionMode::off: return "off";
    case CorrectionMode::second_order: return "second_order";
    case CorrectionMode::high_order: return "high_order";
  }
  return "?";
}

/// Which closed form distributes Psi inside an element. `automatic` picks the
/// triangle formula for three anchors in second-order mode (away from
/// periodic seams), otherwise the mean-centred perp kernel.
enum class CorrectionKernel { automatic, triangle, perp };

inline CorrectionKernel parse_kernel(const std::string& s) {
  if (s == "auto" || s == "automatic") return CorrectionKernel::automatic;
  if (s == "triangle") return CorrectionKernel::triangle;
  if (s == "perp" || s == "ho") return CorrectionKernel::perp;
  throw ConfigError("unknown correction kernel '" + s + "'");
}

/// r = Psi/(4|T|), r1 = r(x2-x3), r2 = r(x3-x1), r3 = r(x1-x2).
inline std::array<Vec2, 3> triangle_correction(double psi, const Vec2& x1, const Vec2& x2, const Vec2& x3) {
  const double twice_area = wedge(x2 - x1, x3 - x1);
  const double scale = std::max({dot(x2 - x1, x2 - x1), dot(x3 - x1, x3 - x1), dot(x3 - x2, x3 - x2)});
  if (!(std::abs(twice_area) > 1e-14 * scale)) throw DegenerateElement("triangle_correction: degenerate triangle");
  const double r = psi / (2.0 * twice_area);
  return {r * (x2 - x3), r * (x3 - x1), r * (x1 - x2)};
}

/// Tetrahedron kernel: r2 = c Psi x (x14 x x31), r3 = c Psi x (x21 x x14),
/// r4 = c Psi x (x31 x x12), r1 = -(r2 + r3 + r4), c = -1/(2 det(x21, x31, x14)),
/// with xij = xi - xj.
inline std::array<Vec3, 4> tet_correction(const Vec3& psi, const Vec3& x1, const Vec3& x2, const Vec3& x3,
                                          const Vec3& x4) {
  const Vec3 x21 = x2 - x1, x31 = x3 - x1, x14 = x1 - x4, x12 = x1 - x2;
  const double det = dot(x21, cross(x31, x14));
  const double scale = std::max({dot(x21, x21), dot(x31, x31), dot(x14, x14)});
  if (!(std::abs(det) > 1e-14 * std::pow(scale, 1.5))) throw DegenerateElement("tet_correction: degenerate tetrahedron");
  const double c = -1.0 / (2.0 * det);
  const Vec3 r2 = c * cross(psi, cross(x14, x31));
  const Vec3 r3 = c * cross(psi, cross(x21, x14));
  const Vec3 r4 = c * cross(psi, cross(x31, x12));
  const Vec3 r1 = Vec3{} - (r2 + r3 + r4);
  return {r1, r2, r3, r4};
}

/// Mean-centred perp kernel: r_s = alpha (a_s - abar)^perp with
/// alpha = Psi / sum |a_s - abar|^2.
inline std::vector<Vec2> perp_correction(double psi, std::span<const Vec2> anchors) {
  const std::size_t n = anchors.size();
  if (n < 2) throw DegenerateElement("correction needs at least two anchors");
  Vec2 mean{};
  double mag = 0.0;
  for (const auto& a : anchors) {
    mean += a;
    mag = std::max(mag, dot(a, a));
  }
  mean = (1.0 / static_cast<double>(n)) * mean;
  double spread = 0.0;
  for (const auto& a : anchors) spread += dot(a - mean, a - mean);
  if (!(spread > 1e-28 * std::max(mag, 1e-300))) throw DegenerateElement("correction anchors coincide");
  const double alpha = psi / spread;
  std::vector<Vec2> r(n);
  for (std::size_t s = 0; s < n; ++s) r[s] = alpha * perp(anchors[s] - mean);
  return r;
}

inline std::vector<Vec2> ho_correction(double psi, std::span<const Vec2> anchors) {
  return perp_correction(psi, anchors);
}

inline std::vector<Vec2> boundary_correction(double psi, std::span<const Vec2> anchors) {
  return perp_correction(psi, anchors);
}

/// Psi^K = sum_s W_s ^ dm_s + flux - sum_s a_s ^ res_m,s, where W_s ^ dm_s is
/// the discrete int_K (J_l - J_0), `flux` the time-integrated oint G.n and
/// res_m the momentum block of the element residuals.
inline double target_psi(std::span<const Vec2> anchors, std::span<const Vec2> weights, std::span<const Vec2> dm,
                         double flux, std::span<const State> res) {
  double psi = flux;
  for (std::size_t s = 0; s < anchors.size(); ++s) {
    if (!weights.empty()) psi += wedge(weights[s], dm[s]);
    psi -= wedge(anchors[s], momentum(res[s]));
  }
  return psi;
}

/// Add r_s to the momentum block of `res` so that the anchor-wedge sum equals
/// the target. Mass and energy entries are not touched. Returns Psi.
inline double correct_residuals(CorrectionKernel kernel, std::span<const Vec2> anchors,
                                std::span<const Vec2> weights, std::span<const Vec2> dm, double flux,
                                std::span<State> res) {
  const double psi = target_psi(anchors, weights, dm, flux, res);
  auto apply = [&res](std::size_t s, const Vec2& r) {
    res[s][1] += r.x;
    res[s][2] += r.y;
  };
  if (kernel == CorrectionKernel::triangle) {
    if (anchors.size() != 3) throw UnsupportedElement("triangle correction kernel needs three anchors");
    const auto r = triangle_correction(psi, anchors[0], anchors[1], anchors[2]);
    for (std::size_t s = 0; s < 3; ++s) apply(s, r[s]);
  } else {
    const auto r = perp_correction(psi, anchors);
    for (std::size_t s = 0; s < r.size(); ++s) apply(s, r[s]);
  }
  return psi;
}

}  // namespace amrd
