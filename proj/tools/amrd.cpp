// amrd command line: run a configured simulation, a convergence study, or
// the correction-kernel self test.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "amrd/driver.hpp"
#include "amrd/selftest.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMesh = 3;
constexpr int kExitBlowup = 4;

std::vector<int> parse_mesh_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw amrd::ConfigError("bad mesh resolution '" + item + "' in --meshes");
    }
  }
  if (out.size() < 2) throw amrd::ConfigError("--meshes needs at least two resolutions");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual distribution Euler solver with angular-momentum correction"};
  app.require_subcommand(1);

  std::string run_cfg;
  auto* run = app.add_subcommand("run", "run a simulation from an INI config");
  run->add_option("config", run_cfg, "config file")->required();
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet, "no progress output");

  std::string study_cfg, meshes;
  auto* study = app.add_subcommand("study", "convergence study on a sequence of n x n meshes");
  study->add_option("config", study_cfg, "config file")->required();
  study->add_option("--meshes", meshes, "comma separated resolutions, e.g. 16,32,64")->required();

  int samples = 1000;
  auto* selftest = app.add_subcommand("kernels-selftest", "randomised exactness checks of the correction kernels");
  selftest->add_option("--samples", samples, "samples per kernel");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = amrd::load_config(run_cfg);
      const auto res = amrd::run(cfg, quiet ? nullptr : &std::cerr);
      if (res.blew_up) {
        std::cout << "blow-up at t = " << res.blowup_time << " after " << res.steps << " steps: " << res.message
                  << '\n';
        return kExitBlowup;
      }
      std::cout << "done: t = " << res.t_end << ", steps = " << res.steps << ", max |J - J0| = " << res.max_dJ
                << '\n';
      return 0;
    }
    if (*study) {
      const auto cfg = amrd::load_config(study_cfg);
      const auto rows = amrd::convergence_study(cfg, parse_mesh_list(meshes), &std::cerr);
      std::printf("%6s %14s %14s %8s\n", "n", "h", "L2(rho)", "order");
      for (const auto& r : rows) std::printf("%6d %14.6e %14.6e %8.3f\n", r.n, r.h, r.l2_rho, r.order);
      return 0;
    }
    if (*selftest) {
      bool ok = true;
      for (const auto& r : amrd::selftest::run_kernel_checks(samples)) {
        std::printf("%-12s samples=%d max|sum r|=%.3e max|wedge-psi|/|psi|=%.3e %s\n", r.kernel.c_str(), r.samples,
                    r.max_sum, r.max_wedge, r.pass() ? "PASS" : "FAIL");
        ok = ok && r.pass();
      }
      return ok ? 0 : 1;
    }
  } catch (const amrd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const amrd::UnsupportedElement& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const amrd::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kExitMesh;
  } catch (const amrd::StepFailure& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kExitBlowup;
  } catch (const amrd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
