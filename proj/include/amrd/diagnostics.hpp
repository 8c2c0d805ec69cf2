#pragma once

// Conservation totals, the discrete angular momentum and error norms.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "amrd/angular_correction.hpp"
#include "amrd/core.hpp"
#include "amrd/euler_physics.hpp"
#include "amrd/fe_space.hpp"

namespace amrd {

/// sum_s |C_s| u_s, i.e. the exact integral of each conservative variable.
inline State totals(const FESpace& sp, std::span<const State> u) {
  State t{};
  for (std::size_t i = 0; i < sp.ndofs(); ++i) t += sp.lumped.c_sigma[i] * u[i];
  return t;
}

/// Discrete J. second_order: sum_s |C_s| x_s ^ m_s (= sum_K sum_s (int_K B_s) x_s ^ m_s);
/// high_order: sum_s |C_s| y_s ^ m_s.
inline double total_J(const FESpace& sp, std::span<const State> u, CorrectionMode form) {
  const auto& lm = sp.lumped;
  double J = 0.0;
  for (std::size_t i = 0; i < sp.ndofs(); ++i) {
    const Vec2& a = form == CorrectionMode::second_order ? lm.x_sigma[i] : lm.y_sigma[i];
    J += lm.c_sigma[i] * wedge(a, momentum(u[i]));
  }
  return J;
}

struct Norms {
  State l1{}, l2{}, linf{};
};

/// Norms of the reconstructed field minus a reference, per conservative
/// variable, by element quadrature.
inline Norms error_norms(const FESpace& sp, std::span<const State> u, const std::function<State(const Vec2&)>& ref) {
  Norms n;
  const std::size_t nloc = sp.nloc();
  std::vector<State> loc(nloc);
  for (std::size_t k = 0; k < sp.mesh.size(); ++k) {
    const auto g = sp.dofs.dofs(k);
    for (std::size_t s = 0; s < nloc; ++s) loc[s] = u[static_cast<std::size_t>(g[s])];
    const auto& d = sp.elem[k];
    for (std::size_t q = 0; q < sp.ref.nq(); ++q) {
      State uq{};
      for (std::size_t s = 0; s < nloc; ++s) uq += sp.ref.phi[q * nloc + s] * loc[s];
      const State e = uq - ref(d.x[q]);
      for (std::size_t c = 0; c < 4; ++c) {
        n.l1[c] += d.w[q] * std::abs(e[c]);
        n.l2[c] += d.w[q] * e[c] * e[c];
        n.linf[c] = std::max(n.linf[c], std::abs(e[c]));
      }
    }
  }
  for (auto& v : n.l2) v = std::sqrt(v);
  return n;
}

struct LedgerRow {
  double t = 0.0;
  double mass = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double E = 0.0;
  double J = 0.0;
  double dJ = 0.0;
};

inline LedgerRow ledger_row(const FESpace& sp, std::span<const State> u, double t, CorrectionMode form, double J0) {
  const State tot = totals(sp, u);
  const double J = total_J(sp, u, form);
  return {t, tot[0], tot[1], tot[2], tot[3], J, std::abs(J - J0)};
}

inline constexpr const char* kLedgerHeader = "t,mass,mx,my,E,J,dJ";

inline void write_ledger_row(std::ostream& os, const LedgerRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass, r.mx, r.my, r.E, r.J,
                r.dJ);
  os << buf;
}

inline void write_ledger(std::ostream& os, std::span<const LedgerRow> rows) {
  os << kLedgerHeader << '\n';
  for (const auto& r : rows) write_ledger_row(os, r);
}

inline std::vector<LedgerRow> read_ledger(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kLedgerHeader) throw FormatError("ledger: bad header", 1);
  std::vector<LedgerRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    LedgerRow r;
    if (!(ss >> r.t >> r.mass >> r.mx >> r.my >> r.E >> r.J >> r.dJ)) throw FormatError("ledger: bad row", lineno);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace amrd
