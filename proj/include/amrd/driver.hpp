#pragma once

// Run configuration (INI), problem assembly, the time loop and the
// convergence study.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "amrd/angular_correction.hpp"
#include "amrd/cases.hpp"
#include "amrd/dec_time.hpp"
#include "amrd/diagnostics.hpp"
#include "amrd/fe_space.hpp"
#include "amrd/io.hpp"
#include "amrd/mesh.hpp"
#include "amrd/residual_schemes.hpp"

namespace amrd {

struct RunConfig {
  // [case]
  std::string case_name = "isentropic_vortex";
  double beta = 5.0;
  double gamma = 1.4;
  std::optional<double> final_time;
  std::optional<double> cfl;
  // [mesh]
  std::string mesh_file;                 // gmsh file; empty means generator
  std::string generator;                 // triangles | quads | disc; empty = case default
  std::optional<int> n;                  // cells per side
  std::optional<std::array<double, 4>> box;  // x0 x1 y0 y1
  double radius = 2.0;
  std::optional<int> rings;
  std::optional<bool> periodic;
  std::map<std::string, std::string> bc;  // tag -> kind overrides
  // [scheme]
  int degree = 1;
  std::optional<Scheme> scheme;
  std::optional<double> theta_cip;
  double tau_supg = 0.5;
  double velocity_floor = 1e-8;
  std::optional<CorrectionMode> correction;
  CorrectionKernel kernel = CorrectionKernel::automatic;
  std::optional<CorrectionMode> j_form;
  int substeps = 0;     // M; 0 = degree
  int iterations = 0;   // DeC sweeps; 0 = M + 1
  // [run]
  std::string output = "out";
  int snapshots = 10;
  int threads = 1;
  long max_steps = 1000000;
  double dt_max = 1e300;
  bool write_files = true;
};

namespace detail {
template <class T>
std::optional<T> opt(const boost::property_tree::ptree& pt, const std::string& key) {
  auto v = pt.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
      if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
      throw std::invalid_argument(*v);
    } else if constexpr (std::is_same_v<T, int>) {
      std::size_t pos = 0;
      const int x = std::stoi(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument(*v);
      return x;
    } else if constexpr (std::is_same_v<T, long>) {
      std::size_t pos = 0;
      const long x = std::stol(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument(*v);
      return x;
    } else if constexpr (std::is_same_v<T, double>) {
      std::size_t pos = 0;
      const double x = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument(*v);
      return x;
    } else {
      return *v;
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + *v + "' for key " + key);
  }
}

inline void check_keys(const boost::property_tree::ptree& pt) {
  static const std::map<std::string, std::vector<std::string>> known{
      {"case", {"name", "beta", "gamma", "final_time", "cfl"}},
      {"mesh", {"file", "generator", "n", "x0", "x1", "y0", "y1", "radius", "rings", "periodic"}},
      {"bc", {}},
      {"scheme", {"degree", "scheme", "theta_cip", "tau_supg", "velocity_floor", "correction", "kernel", "j_form",
                  "substeps", "iterations"}},
      {"run", {"output", "snapshots", "threads", "max_steps", "dt_max"}}};
  for (const auto& [sec, body] : pt) {
    auto it = known.find(sec);
    if (it == known.end()) throw ConfigError("unknown config section [" + sec + "]");
    if (sec == "bc") continue;
    for (const auto& [key, val] : body)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + sec + "]");
  }
}
}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base = {}) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  detail::check_keys(pt);
  RunConfig c;
  using detail::opt;
  if (auto v = opt<std::string>(pt, "case.name")) c.case_name = *v;
  if (auto v = opt<double>(pt, "case.beta")) c.beta = *v;
  if (auto v = opt<double>(pt, "case.gamma")) c.gamma = *v;
  c.final_time = opt<double>(pt, "case.final_time");
  c.cfl = opt<double>(pt, "case.cfl");
  if (auto v = opt<std::string>(pt, "mesh.file")) {
    std::filesystem::path p(*v);
    c.mesh_file = (p.is_relative() && !base.empty() ? base / p : p).string();
  }
  if (auto v = opt<std::string>(pt, "mesh.generator")) c.generator = *v;
  c.n = opt<int>(pt, "mesh.n");
  {
    auto x0 = opt<double>(pt, "mesh.x0"), x1 = opt<double>(pt, "mesh.x1");
    auto y0 = opt<double>(pt, "mesh.y0"), y1 = opt<double>(pt, "mesh.y1");
    if (x0 || x1 || y0 || y1) {
      if (!(x0 && x1 && y0 && y1)) throw ConfigError("mesh box needs all of x0, x1, y0, y1");
      c.box = std::array<double, 4>{*x0, *x1, *y0, *y1};
    }
  }
  if (auto v = opt<double>(pt, "mesh.radius")) c.radius = *v;
  c.rings = opt<int>(pt, "mesh.rings");
  c.periodic = opt<bool>(pt, "mesh.periodic");
  if (auto bc = pt.get_child_optional("bc"))
    for (const auto& [tag, val] : *bc) {
      parse_bc_kind(val.data());
      c.bc[tag] = val.data();
    }
  if (auto v = opt<int>(pt, "scheme.degree")) c.degree = *v;
  if (auto v = opt<std::string>(pt, "scheme.scheme")) c.scheme = parse_scheme(*v);
  c.theta_cip = opt<double>(pt, "scheme.theta_cip");
  if (auto v = opt<double>(pt, "scheme.tau_supg")) c.tau_supg = *v;
  if (auto v = opt<double>(pt, "scheme.velocity_floor")) c.velocity_floor = *v;
  if (auto v = opt<std::string>(pt, "scheme.correction")) c.correction = parse_correction(*v);
  if (auto v = opt<std::string>(pt, "scheme.kernel")) c.kernel = parse_kernel(*v);
  if (auto v = opt<std::string>(pt, "scheme.j_form")) c.j_form = parse_correction(*v);
  if (auto v = opt<int>(pt, "scheme.substeps")) c.substeps = *v;
  if (auto v = opt<int>(pt, "scheme.iterations")) c.iterations = *v;
  if (auto v = opt<std::string>(pt, "run.output")) c.output = *v;
  if (auto v = opt<int>(pt, "run.snapshots")) c.snapshots = *v;
  if (auto v = opt<int>(pt, "run.threads")) c.threads = *v;
  if (auto v = opt<long>(pt, "run.max_steps")) c.max_steps = *v;
  if (auto v = opt<double>(pt, "run.dt_max")) c.dt_max = *v;
  if (c.degree != 1 && c.degree != 2) throw ConfigError("degree must be 1 or 2");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.snapshots < 0) throw ConfigError("snapshots must be >= 0");
  if (c.j_form && *c.j_form == CorrectionMode::off) throw ConfigError("j_form must be second_order or high_order");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f, std::filesystem::path(path).parent_path());
}

/// A fully assembled problem plus its state.
struct Simulation {
  RunConfig cfg;
  std::shared_ptr<FESpace> space;  // heap-held so problem.space survives moves
  Problem problem;
  std::vector<State> u;
  double t = 0.0;
  double final_time = 1.0;
  double cfl = 0.5;
  int M = 1;
  int iterations = 2;
  CorrectionMode j_form = CorrectionMode::second_order;
  bool periodic = false;
  Vec2 period{};
  std::function<State(const Vec2&, double)> exact;  // empty if none

  double dt() const { return compute_dt(*space, u, cfl, problem.gas, cfg.dt_max); }
  void step(double dt, DecStats* stats = nullptr) {
    dec_step(problem, u, dt, M, iterations, stats);
    t += dt;
  }
  double J() const { return total_J(*space, u, j_form); }
};

namespace detail {
struct CaseDefaults {
  std::string generator;
  int n;
  std::array<double, 4> box;
  bool periodic;
  std::string bc;
  Scheme scheme;
  double final_time;
  double cfl;
  bool smooth;
  double theta_cip = 0.1;
};

inline CaseDefaults case_defaults(const RunConfig& c) {
  if (c.case_name == "isentropic_vortex")
    return {"triangles", 32, {-10, 10, -10, 10}, true, "dirichlet", Scheme::galerkin_cip, 1.0, 0.5, true};
  if (c.case_name == "four_vortex")
    return {"triangles", c.degree == 1 ? 64 : 32, {-10, 10, -10, 10}, false, "wall", Scheme::galerkin_cip, 1.0, 0.5,
            false};
  if (c.case_name == "gresho") return {"disc", 0, {}, false, "gradient_free", Scheme::psi_cip, 0.16, 0.25, false};
  if (c.case_name == "sod") return {"quads", 100, {-1, 1, -1, 1}, false, "wall", Scheme::psi_cip, 0.16, 0.5, false, 0.01};
  throw ConfigError("unknown case '" + c.case_name + "'");
}
}  // namespace detail

inline Simulation setup(const RunConfig& cfg) {
  const auto def = detail::case_defaults(cfg);
  Simulation sim;
  sim.cfg = cfg;
  const Gas gas{cfg.gamma};
  if (!(gas.gamma > 1.0)) throw ConfigError("gamma must exceed 1");

  Mesh mesh;
  const auto box = cfg.box.value_or(def.box);
  sim.periodic = cfg.periodic.value_or(def.periodic);
  if (!cfg.mesh_file.empty()) {
    mesh = load_gmsh(cfg.mesh_file);
  } else {
    const std::string gen = cfg.generator.empty() ? def.generator : cfg.generator;
    const int n = cfg.n.value_or(def.n);
    if (gen == "triangles") {
      mesh = structured_triangles(n, n, box[0], box[1], box[2], box[3]);
    } else if (gen == "quads") {
      mesh = structured_quads(n, n, box[0], box[1], box[2], box[3]);
    } else if (gen == "disc") {
      mesh = disc_mesh(cfg.radius, cfg.rings.value_or(40));
    } else {
      throw ConfigError("unknown mesh generator '" + gen + "'");
    }
  }
  if (sim.periodic) {
    if (!cfg.mesh_file.empty() || box[1] <= box[0] || box[3] <= box[2])
      throw ConfigError("periodic runs need a generated box mesh");
    sim.period = {box[1] - box[0], box[3] - box[2]};
    mesh = make_periodic(std::move(mesh), "left", "right", {sim.period.x, 0.0});
    mesh = make_periodic(std::move(mesh), "bottom", "top", {0.0, sim.period.y});
  }
  sim.space = std::make_shared<FESpace>(make_space(std::move(mesh), cfg.degree));

  InitialData init;
  VortexParams vp{cfg.beta, cfg.gamma, {}, {1.0, 0.0}};
  if (cfg.case_name == "isentropic_vortex") {
    detail::check_vortex_beta(cfg.beta, cfg.gamma);
    init = [vp](const Vec2& x) { return isentropic_vortex(x, vp); };
    if (sim.periodic) {
      const Vec2 period = sim.period;
      sim.exact = [vp, period, gas](const Vec2& x, double t) {
        return to_conservative(vortex_exact(x, t, vp, period), gas);
      };
    }
  } else if (cfg.case_name == "four_vortex") {
    detail::check_vortex_beta(cfg.beta, cfg.gamma);
    const double beta = cfg.beta, g = cfg.gamma;
    init = [beta, g](const Vec2& x) { return four_vortex(x, beta, g); };
  } else if (cfg.case_name == "gresho") {
    init = [](const Vec2& x) { return gresho(x); };
  } else {
    init = [](const Vec2& x) { return sod2d(x); };
  }

  Problem& P = sim.problem;
  P.space = sim.space.get();
  P.gas = gas;
  P.scheme.scheme = cfg.scheme.value_or(def.scheme);
  P.scheme.theta_cip = cfg.theta_cip.value_or(def.theta_cip);
  P.scheme.tau_supg = cfg.tau_supg;
  P.scheme.velocity_floor = cfg.velocity_floor;
  P.correction = cfg.correction.value_or(cfg.degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order);
  P.kernel = cfg.kernel;
  P.threads = cfg.threads;
  for (const auto& f : sim.space->mesh.boundary_faces) {
    auto it = cfg.bc.find(f.tag);
    P.face_bc.push_back(parse_bc_kind(it != cfg.bc.end() ? it->second : def.bc));
  }
  P.dirichlet = [init, gas](const Vec2& x) { return to_conservative(init(x), gas); };

  sim.final_time = cfg.final_time.value_or(def.final_time);
  sim.cfl = cfg.cfl.value_or(def.cfl);
  if (!(sim.cfl > 0.0) || !(sim.final_time > 0.0)) throw ConfigError("cfl and final_time must be positive");
  sim.M = cfg.substeps > 0 ? cfg.substeps : cfg.degree;
  theta_table(sim.M);
  sim.iterations = cfg.iterations > 0 ? cfg.iterations : sim.M + 1;
  const CorrectionMode natural = cfg.degree == 1 ? CorrectionMode::second_order : CorrectionMode::high_order;
  sim.j_form = cfg.j_form.value_or(P.correction != CorrectionMode::off ? P.correction : natural);
  sim.u = project_initial(*sim.space, init, gas, def.smooth);
  for (std::size_t i = 0; i < sim.u.size(); ++i)
    if (!admissible(sim.u[i], gas)) throw ConfigError("initial data inadmissible at DOF " + std::to_string(i));
  return sim;
}

struct RunResult {
  int exit_code = 0;
  bool blew_up = false;
  double t_end = 0.0;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
  double J0 = 0.0;
  double max_dJ = 0.0;
  std::vector<LedgerRow> ledger;
  std::vector<double> step_dt;
  std::string message;
  double wall_seconds = 0.0;
  std::optional<Norms> errors;
};

/// Advance `sim` to its final time. Files are written to cfg.output when
/// cfg.write_files is set. Step failures end the run with exit code 4.
inline RunResult run_simulation(Simulation& sim, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  const auto& cfg = sim.cfg;
  const auto t_start = std::chrono::steady_clock::now();
  RunResult res;
  res.J0 = sim.J();
  res.ledger.push_back(ledger_row(*sim.space, sim.u, sim.t, sim.j_form, res.J0));
  std::ofstream ledger_file;
  int snap_index = 0;
  auto snapshot = [&](const std::vector<State>& u) {
    if (!cfg.write_files || cfg.snapshots == 0) return;
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04d.vtk", snap_index++);
    write_vtk((fs::path(cfg.output) / name).string(), *sim.space, u, sim.problem.gas,
              cfg.case_name + " t=" + std::to_string(sim.t));
  };
  if (cfg.write_files) {
    fs::create_directories(cfg.output);
    ledger_file.open(fs::path(cfg.output) / "ledger.csv");
    if (!ledger_file) throw Error("cannot write ledger in " + cfg.output);
    ledger_file << kLedgerHeader << '\n';
    write_ledger_row(ledger_file, res.ledger.back());
  }
  snapshot(sim.u);
  const double snap_dt = cfg.snapshots > 0 ? sim.final_time / cfg.snapshots : 0.0;
  double next_snap = snap_dt;
  while (sim.t < sim.final_time && res.steps < cfg.max_steps) {
    double dt = sim.dt();
    if (sim.t + dt >= sim.final_time * (1.0 - 1e-14)) dt = sim.final_time - sim.t;
    const std::vector<State> last = sim.u;
    try {
      sim.step(dt);
    } catch (const StepFailure& e) {
      sim.u = last;
      res.blew_up = true;
      res.blowup_time = sim.t;
      res.exit_code = 4;
      res.message = e.what();
      snapshot(sim.u);
      break;
    }
    if (sim.final_time - sim.t < 1e-14 * sim.final_time) sim.t = sim.final_time;
    ++res.steps;
    res.step_dt.push_back(dt);
    res.ledger.push_back(ledger_row(*sim.space, sim.u, sim.t, sim.j_form, res.J0));
    res.max_dJ = std::max(res.max_dJ, res.ledger.back().dJ);
    if (cfg.write_files) write_ledger_row(ledger_file, res.ledger.back());
    if (snap_dt > 0 && (sim.t >= next_snap * (1.0 - 1e-12) || sim.t >= sim.final_time)) {
      snapshot(sim.u);
      while (next_snap <= sim.t * (1.0 + 1e-12)) next_snap += snap_dt;
    }
    if (log && res.steps % 50 == 0)
      *log << "step " << res.steps << " t=" << sim.t << " dt=" << dt << " dJ=" << res.ledger.back().dJ << '\n';
  }
  res.t_end = sim.t;
  if (sim.exact) {
    const double t = sim.t;
    auto ex = sim.exact;
    res.errors = error_norms(*sim.space, sim.u, [&ex, t](const Vec2& x) { return ex(x, t); });
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (cfg.write_files) {
    std::ofstream s(fs::path(cfg.output) / "summary.txt");
    s << std::setprecision(17);
    s << "case = " << cfg.case_name << "\nstatus = " << (res.blew_up ? "blowup" : "ok") << "\nsteps = " << res.steps
      << "\nt_final = " << res.t_end << "\n";
    if (res.blew_up) s << "blowup_time = " << res.blowup_time << "\nreason = " << res.message << "\n";
    s << "dofs = " << sim.space->ndofs() << "\nelements = " << sim.space->mesh.size()
      << "\nscheme = " << to_string(sim.problem.scheme.scheme) << "\ndegree = " << sim.space->degree()
      << "\ncorrection = " << to_string(sim.problem.correction) << "\nJ0 = " << res.J0
      << "\nmax_dJ = " << res.max_dJ << "\n";
    const auto& l0 = res.ledger.front();
    const auto& l1 = res.ledger.back();
    s << "mass_drift = " << l1.mass - l0.mass << "\nenergy_drift = " << l1.E - l0.E << "\n";
    if (res.errors)
      s << "l1_rho = " << res.errors->l1[0] << "\nl2_rho = " << res.errors->l2[0] << "\nlinf_rho = " << res.errors->linf[0]
        << "\n";
    s << "wall_seconds = " << res.wall_seconds << "\n";
  }
  return res;
}

inline RunResult run(const RunConfig& cfg, std::ostream* log = nullptr) {
  Simulation sim = setup(cfg);
  return run_simulation(sim, log);
}

struct StudyRow {
  int n = 0;
  double h = 0.0;
  double l2_rho = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
};

/// Runs `cfg` on n x n meshes and reports the L2 density error against the
/// exact solution with observed orders between successive meshes.
inline std::vector<StudyRow> convergence_study(RunConfig cfg, const std::vector<int>& ns, std::ostream* log = nullptr) {
  std::vector<StudyRow> rows;
  const std::string base = cfg.output;
  for (int n : ns) {
    cfg.n = n;
    cfg.output = base + "/n" + std::to_string(n);
    Simulation sim = setup(cfg);
    if (!sim.exact) throw ConfigError("convergence study needs a case with an exact solution on a periodic box");
    const RunResult r = run_simulation(sim);
    if (r.blew_up) throw StepFailure("convergence run blew up: " + r.message, 0, -1);
    StudyRow row{n, sim.period.x / n, r.errors->l2[0]};
    if (!rows.empty()) row.order = std::log(rows.back().l2_rho / row.l2_rho) / std::log(rows.back().h / row.h);
    rows.push_back(row);
    if (log) *log << "n=" << n << " h=" << row.h << " L2(rho)=" << row.l2_rho << " order=" << row.order << '\n';
  }
  return rows;
}

}  // namespace amrd
