// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion names
// as arguments to run a subset, e.g. `acceptance kernels translation`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "amrd/driver.hpp"
#include "amrd/selftest.hpp"

using namespace amrd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

void add(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig base(const std::string& case_name, int degree) {
  RunConfig c;
  c.case_name = case_name;
  c.degree = degree;
  c.write_files = false;
  return c;
}

struct Trace {
  bool completed = false;
  double t_end = 0.0;
  double blowup_time = std::numeric_limits<double>::infinity();
  long steps = 0;
  double J0 = 0.0;
  double max_dJ = 0.0;
  double rho_min = 1e300, rho_max = -1e300;
  std::string message;
};

// Steps the simulation to its final time, tracking J and the density range
// of the DOF values after every step.
Trace trace(Simulation& sim) {
  Trace tr;
  tr.J0 = sim.J();
  auto density = [&] {
    for (const auto& u : sim.u) {
      tr.rho_min = std::min(tr.rho_min, u[0]);
      tr.rho_max = std::max(tr.rho_max, u[0]);
    }
  };
  density();
  while (sim.t < sim.final_time) {
    double dt = sim.dt();
    if (sim.t + dt >= sim.final_time * (1.0 - 1e-14)) dt = sim.final_time - sim.t;
    try {
      sim.step(dt);
    } catch (const StepFailure& e) {
      tr.blowup_time = sim.t;
      tr.message = e.what();
      tr.t_end = sim.t;
      return tr;
    }
    ++tr.steps;
    tr.max_dJ = std::max(tr.max_dJ, std::abs(sim.J() - tr.J0));
    density();
  }
  tr.completed = true;
  tr.t_end = sim.t;
  return tr;
}

double j_tol(double J0) { return 1e-10 * std::max(std::abs(J0), 1.0); }

// --- criteria -------------------------------------------------------------

Outcome check_kernels() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto reps = selftest::run_kernel_checks(1000);
  const double secs = seconds_since(t0);
  for (const auto& r : reps)
    add(o, r.pass(1e-14, 1e-12), fmt("%s sum %.1e wedge %.1e", r.kernel.c_str(), r.max_sum, r.max_wedge));
  add(o, secs < 1.0, fmt("%.3f s", secs));
  return o;
}

Outcome check_conservation() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto reps = selftest::conservation_check(100);
  const double secs = seconds_since(t0);
  for (const auto& r : reps) add(o, r.max_rel <= 1e-12, fmt("%s %.1e", r.scheme.c_str(), r.max_rel));
  add(o, secs < 10.0, fmt("%.2f s", secs));
  return o;
}

Outcome check_angular_momentum() {
  Outcome o;
  for (int degree : {1, 2}) {
    const auto on_mode = degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order;
    for (auto mode : {on_mode, CorrectionMode::off}) {
      RunConfig c = base("isentropic_vortex", degree);
      c.n = 32;
      c.beta = 5.0;
      c.final_time = 1.0;
      c.cfl = 0.5;
      c.correction = mode;
      c.j_form = on_mode;
      Simulation sim = setup(c);
      const Trace tr = trace(sim);
      const bool on = mode != CorrectionMode::off;
      const bool ok = tr.completed && (on ? tr.max_dJ <= j_tol(tr.J0) : tr.max_dJ > 1e-6);
      add(o, ok, fmt("B%d %s max|dJ| %.2e (J0 %.3e, %ld steps, %zu elements)", degree, on ? "on" : "off", tr.max_dJ,
                     tr.J0, tr.steps, sim.space->mesh.size()));
    }
  }
  return o;
}

Outcome check_order() {
  Outcome o;
  struct Study {
    int degree;
    std::vector<int> ns;
    double min_order;
  };
  for (const Study& st : {Study{1, {32, 64, 128}, 1.8}, Study{2, {16, 32, 64}, 2.6}}) {
    const auto on_mode = st.degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order;
    for (auto mode : {on_mode, CorrectionMode::off}) {
      RunConfig c = base("isentropic_vortex", st.degree);
      c.beta = 5.0;
      c.final_time = 1.0;
      c.correction = mode;
      const auto rows = convergence_study(c, st.ns);
      std::string tbl;
      for (const auto& r : rows) tbl += fmt(" n=%d %.3e", r.n, r.l2_rho);
      const double p = rows.back().order;
      add(o, p >= st.min_order,
          fmt("B%d %s order %.2f (previous pair %.2f, need %.1f):", st.degree, mode == CorrectionMode::off ? "off" : "on",
              p, rows[1].order, st.min_order) +
              tbl);
    }
  }
  return o;
}

// max |v_phi| over the element quadrature points and vertices
double max_vphi(const Simulation& sim) {
  const FESpace& sp = *sim.space;
  const std::size_t nloc = sp.nloc();
  double m = 0.0;
  std::vector<double> phi(nloc);
  std::vector<Vec2> grad(nloc);
  auto check = [&](const Vec2& x, const State& u) {
    const double r = norm(x);
    if (r > 1e-12) m = std::max(m, std::abs(wedge(x, momentum(u))) / (u[0] * r));
  };
  for (std::size_t k = 0; k < sp.mesh.size(); ++k) {
    const auto g = sp.dofs.dofs(k);
    for (std::size_t q = 0; q < sp.ref.nq(); ++q) {
      State u{};
      for (std::size_t s = 0; s < nloc; ++s) u += sp.ref.phi[q * nloc + s] * sim.u[static_cast<std::size_t>(g[s])];
      check(sp.elem[k].x[q], u);
    }
    for (int v = 0; v < sp.ref.nvert; ++v) check(sp.elem[k].xdof[static_cast<std::size_t>(v)], sim.u[static_cast<std::size_t>(g[static_cast<std::size_t>(v)])]);
  }
  return m;
}

Outcome check_gresho() {
  Outcome o;
  for (Scheme s : {Scheme::psi_cip, Scheme::galerkin_cip}) {
    RunConfig c = base("gresho", 2);
    c.scheme = s;
    c.final_time = 0.16;
    c.cfl = 0.25;
    c.correction = CorrectionMode::high_order;
    Simulation sim = setup(c);
    const Trace tr = trace(sim);
    const double vmax = tr.completed ? max_vphi(sim) : std::numeric_limits<double>::infinity();
    add(o, tr.completed && tr.max_dJ <= j_tol(tr.J0) && vmax <= 1.1,
        fmt("B2 %s %s t=%.3f max|dJ| %.2e (J0 %.4f) max|v_phi| %.4f", to_string(s).c_str(),
            tr.completed ? "completed" : "blew up", tr.t_end, tr.max_dJ, tr.J0, vmax));
  }
  return o;
}

Outcome check_sod() {
  Outcome o;
  for (const char* gen : {"quads", "triangles"})
    for (auto mode : {CorrectionMode::second_order, CorrectionMode::off}) {
      RunConfig c = base("sod", 1);
      c.generator = gen;
      c.n = 100;
      c.scheme = Scheme::psi_cip;
      c.final_time = 0.16;
      c.correction = mode;
      Simulation sim = setup(c);
      const Trace tr = trace(sim);
      const bool ok = tr.completed && tr.rho_min >= 0.11 && tr.rho_max <= 1.05;
      add(o, ok, fmt("%s %s %s rho in [%.4f, %.4f] (%ld steps)", gen, mode == CorrectionMode::off ? "off" : "on",
                     tr.completed ? "completed" : "blew up", tr.rho_min, tr.rho_max, tr.steps));
    }
  return o;
}

Outcome check_four_vortex() {
  Outcome o;
  for (int degree : {1, 2}) {
    const auto on_mode = degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order;
    std::map<bool, Trace> tr;
    for (bool on : {true, false}) {
      RunConfig c = base("four_vortex", degree);
      c.beta = 7.5;
      c.scheme = Scheme::galerkin_cip;
      c.theta_cip = 0.1;
      c.correction = on ? on_mode : CorrectionMode::off;
      Simulation sim = setup(c);
      tr[on] = trace(sim);
    }
    auto when = [](const Trace& t) { return t.completed ? std::string("no blow-up") : fmt("blow-up t=%.4f", t.blowup_time); };
    add(o, tr[true].blowup_time >= tr[false].blowup_time,
        fmt("B%d corrected %s, uncorrected %s", degree, when(tr[true]).c_str(), when(tr[false]).c_str()));
  }
  return o;
}

Outcome check_dec_contraction() {
  Outcome o;
  for (int degree : {1, 2})
    for (bool corr : {true, false}) {
      RunConfig c = base("isentropic_vortex", degree);
      c.n = 16;
      c.correction = corr ? (degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order) : CorrectionMode::off;
      Simulation sim = setup(c);
      const double dt = sim.dt();
      bool mono = true;
      double worst = 0.0;
      for (int n = 0; n < 5; ++n) {
        DecStats st;
        sim.step(dt, &st);
        for (std::size_t p = 1; p < st.defect.size(); ++p) {
          mono = mono && st.defect[p] < st.defect[p - 1];
          worst = std::max(worst, st.defect[p] / st.defect[p - 1]);
        }
      }
      add(o, mono, fmt("B%d %s %d sweeps, worst ratio %.2e", degree, corr ? "on" : "off", sim.iterations, worst));
    }
  return o;
}

Outcome check_translation() {
  Outcome o;
  const double d = selftest::translation_check(1000);
  add(o, d <= 1e-11, fmt("max relative change %.2e", d));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"kernels", check_kernels},
      {"conservation", check_conservation},
      {"angular_momentum", check_angular_momentum},
      {"order", check_order},
      {"gresho", check_gresho},
      {"sod", check_sod},
      {"four_vortex", check_four_vortex},
      {"dec_contraction", check_dec_contraction},
      {"translation", check_translation},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
