#pragma once

// Randomised exactness checks for the correction kernels. Shared by the
// kernels-selftest subcommand and the acceptance suite.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "amrd/angular_correction.hpp"
#include "amrd/fe_space.hpp"
#include "amrd/quadrature.hpp"
#include "amrd/residual_schemes.hpp"

namespace amrd::selftest {

struct KernelReport {
  std::string kernel;
  int samples = 0;
  double max_sum = 0.0;     // |sum r| / max_s |r_s|
  double max_wedge = 0.0;   // |sum a ^ r - Psi| / |Psi|
  bool pass(double sum_tol = 1e-14, double wedge_tol = 1e-12) const {
    return max_sum <= sum_tol && max_wedge <= wedge_tol;
  }
};

// Samples are drawn from non-degenerate configurations: shape quality
// (measure over longest edge to the power of the dimension) at least 1e-2.
inline bool well_shaped(const std::vector<Vec2>& a) {
  double lmax = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) lmax = std::max(lmax, norm(a[i] - a[j]));
  if (a.size() == 3) return std::abs(wedge(a[1] - a[0], a[2] - a[0])) > 1e-2 * lmax * lmax;
  return lmax > 1e-2;
}

inline bool well_shaped(const std::array<Vec3, 4>& x) {
  double lmax = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) lmax = std::max(lmax, norm(x[i] - x[j]));
  return std::abs(dot(x[1] - x[0], cross(x[2] - x[0], x[3] - x[0]))) > 1e-2 * lmax * lmax * lmax;
}

inline std::vector<KernelReport> run_kernel_checks(int samples = 1000, unsigned seed = 20240611u) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto v2 = [&] { return Vec2{U(rng), U(rng)}; };
  auto v3 = [&] { return Vec3{U(rng), U(rng), U(rng)}; };
  std::vector<KernelReport> out;

  // Scaled sum error: |sum r| relative to the size of a single correction.
  auto planar = [&](const std::string& name, int n, auto&& kernel) {
    KernelReport rep{name, samples};
    int done = 0;
    while (done < samples) {
      std::vector<Vec2> a(static_cast<std::size_t>(n));
      for (auto& x : a) x = v2();
      if (!well_shaped(a)) continue;
      const double psi = U(rng) * 10.0;
      std::vector<Vec2> r;
      try {
        r = kernel(psi, a);
      } catch (const DegenerateElement&) {
        continue;
      }
      ++done;
      Vec2 sum{};
      double w = 0.0, rmax = 0.0;
      for (std::size_t s = 0; s < a.size(); ++s) {
        sum += r[s];
        w += wedge(a[s], r[s]);
        rmax = std::max(rmax, norm(r[s]));
      }
      rep.max_sum = std::max(rep.max_sum, norm(sum) / std::max(rmax, 1e-300));
      rep.max_wedge = std::max(rep.max_wedge, std::abs(w - psi) / std::abs(psi));
    }
    out.push_back(rep);
  };
  planar("triangle", 3, [](double psi, const std::vector<Vec2>& a) {
    const auto r = triangle_correction(psi, a[0], a[1], a[2]);
    return std::vector<Vec2>(r.begin(), r.end());
  });
  planar("ho_p2", 6, [](double psi, const std::vector<Vec2>& a) { return ho_correction(psi, a); });
  planar("boundary_b1", 2, [](double psi, const std::vector<Vec2>& a) { return boundary_correction(psi, a); });
  planar("boundary_b2", 3, [](double psi, const std::vector<Vec2>& a) { return boundary_correction(psi, a); });

  KernelReport tet{"tet", samples};
  int done = 0;
  while (done < samples) {
    const std::array<Vec3, 4> x{v3(), v3(), v3(), v3()};
    const Vec3 psi = v3();
    if (!well_shaped(x)) continue;
    std::array<Vec3, 4> r;
    try {
      r = tet_correction(psi, x[0], x[1], x[2], x[3]);
    } catch (const DegenerateElement&) {
      continue;
    }
    ++done;
    Vec3 sum{}, w{};
    double rmax = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      sum += r[i];
      w += cross(x[i] - x[0], r[i]);
      rmax = std::max(rmax, norm(r[i]));
    }
    tet.max_sum = std::max(tet.max_sum, norm(sum) / std::max(rmax, 1e-300));
    tet.max_wedge = std::max(tet.max_wedge, norm(w - psi) / norm(psi));
  }
  out.push_back(tet);
  return out;
}


/// Frame-translation check of the element correction. Residual sets satisfy
/// the momentum balance sum_s res_m = sum_s bint_s dm_s + F, so moving the
/// frame by a changes the target by a ^ 0. Returns the largest
/// |r(x + a) - r(x)| / max|r(x)| over the samples.
inline double translation_check(int samples = 200, unsigned seed = 77u) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const std::size_t n = i % 2 ? 3 : 6;
    const auto kernel = n == 3 ? CorrectionKernel::triangle : CorrectionKernel::perp;
    std::vector<Vec2> x(n), dm(n), w(n);
    std::vector<double> bint(n);
    for (std::size_t s = 0; s < n; ++s) {
      x[s] = {U(rng), U(rng)};
      dm[s] = {U(rng), U(rng)};
      bint[s] = 0.5 + 0.5 * std::abs(U(rng));
    }
    if (n == 3 && !well_shaped(x)) {
      --i;
      continue;
    }
    const Vec2 F{U(rng), U(rng)};
    std::vector<State> res(n);
    Vec2 need = F;
    for (std::size_t s = 0; s < n; ++s) need += bint[s] * dm[s];
    for (std::size_t s = 0; s + 1 < n; ++s) {
      res[s] = {U(rng), U(rng), U(rng), U(rng)};
      need -= momentum(res[s]);
    }
    res[n - 1] = {U(rng), need.x, need.y, U(rng)};
    const double gflux = U(rng);
    const Vec2 a{10.0 * U(rng), 10.0 * U(rng)};
    auto run = [&](const Vec2& shift) {
      std::vector<Vec2> anchors(n), weights(n);
      for (std::size_t s = 0; s < n; ++s) {
        anchors[s] = x[s] + shift;
        weights[s] = bint[s] * anchors[s];
      }
      auto r = res;
      correct_residuals(kernel, anchors, weights, dm, gflux + wedge(shift, F), r);
      std::vector<Vec2> out(n);
      for (std::size_t s = 0; s < n; ++s) out[s] = momentum(r[s]) - momentum(res[s]);
      return out;
    };
    const auto r0 = run({}), r1 = run(a);
    double rmax = 0.0, diff = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      rmax = std::max(rmax, norm(r0[s]));
      diff = std::max(diff, norm(r1[s] - r0[s]));
    }
    worst = std::max(worst, diff / std::max(rmax, 1e-300));
  }
  return worst;
}

/// Element conservation: for random smooth states on random elements,
/// |sum_s Phi_s - oint f.n| / scale, with oint f.n from an independent edge
/// quadrature and scale = max|u| * perimeter. Worst value per scheme.
struct ConservationReport {
  std::string scheme;
  int samples = 0;
  double max_rel = 0.0;
};

inline std::vector<ConservationReport> conservation_check(int samples = 100, unsigned seed = 31u) {
  const Gas gas{1.4};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), S(0.5, 2.0);
  const std::array<std::pair<ElementKind, int>, 3> spaces{
      {{ElementKind::triangle, 1}, {ElementKind::triangle, 2}, {ElementKind::quadrilateral, 1}}};
  const std::array<Scheme, 4> schemes{Scheme::galerkin_cip, Scheme::supg, Scheme::rusanov, Scheme::psi_cip};
  std::vector<ConservationReport> out;
  for (Scheme sc : schemes) out.push_back({to_string(sc), 0, 0.0});
  for (const auto& [kind, degree] : spaces) {
    const auto ref = make_reference(kind, degree);
    const auto line = quadrature::gauss_legendre(static_cast<int>(ref.nq_edge()));
    for (int t = 0; t < samples; ++t) {
      std::vector<Vec2> xv = kind == ElementKind::triangle ? std::vector<Vec2>{{0, 0}, {1, 0}, {0.2, 0.9}}
                                                           : std::vector<Vec2>{{0, 0}, {1, 0}, {1.1, 0.8}, {-0.1, 1}};
      const Vec2 c{3 * U(rng), 3 * U(rng)};
      const double sz = S(rng), th = 3.14159 * U(rng);
      for (auto& p : xv) {
        p = p + Vec2{0.15 * U(rng), 0.15 * U(rng)};
        p = c + sz * Vec2{std::cos(th) * p.x - std::sin(th) * p.y, std::sin(th) * p.x + std::cos(th) * p.y};
      }
      const auto d = make_element_data(ref, xv);
      const double a = U(rng), b = U(rng), cc = U(rng);
      std::vector<State> u;
      double umax = 0.0;
      for (const auto& x : d.xdof) {
        u.push_back(to_conservative({1.0 + 0.3 * std::sin(a * x.x + b * x.y),
                                     {0.5 * std::cos(cc * x.y), 0.4 * std::sin(a * x.x)},
                                     1.0 + 0.2 * std::cos(b * x.x - cc * x.y)},
                                    gas));
        for (double v : u.back()) umax = std::max(umax, std::abs(v));
      }
      State oracle{};
      double perimeter = 0.0;
      std::vector<double> phi(u.size());
      std::vector<Vec2> grad(u.size());
      for (std::size_t e = 0; e < xv.size(); ++e) {
        const Vec2 p0 = xv[e], p1 = xv[(e + 1) % xv.size()], tv = p1 - p0;
        const double len = norm(tv);
        perimeter += len;
        const Vec2 n = (1.0 / len) * Vec2{tv.y, -tv.x};
        for (std::size_t q = 0; q < line.size(); ++q) {
          const Vec2 ra = ref.vref[e], rb = ref.vref[(e + 1) % xv.size()];
          ref.eval(ra + line.points[q] * (rb - ra), phi.data(), grad.data());
          State uq{};
          for (std::size_t s = 0; s < u.size(); ++s) uq += phi[s] * u[s];
          oracle += (line.weights[q] * len) * flux_n(uq, n, gas);
        }
      }
      for (std::size_t i = 0; i < schemes.size(); ++i) {
        const SchemeConfig cfg{schemes[i]};
        std::vector<State> res(u.size(), State{});
        element_residual(ref, d, u, cfg, gas, res);
        if (schemes[i] == Scheme::psi_cip) {
          State mean{};
          for (const auto& x : u) mean += (1.0 / static_cast<double>(u.size())) * x;
          psi_limit(res, mean, cfg, gas);
        }
        State tot{};
        for (const auto& r : res) tot += r;
        double err = 0.0;
        for (std::size_t k = 0; k < 4; ++k) err = std::max(err, std::abs(tot[k] - oracle[k]));
        out[i].samples++;
        out[i].max_rel = std::max(out[i].max_rel, err / (umax * perimeter));
      }
    }
  }
  return out;
}

}  // namespace amrd::selftest
