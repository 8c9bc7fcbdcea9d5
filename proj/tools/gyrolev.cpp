#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "gyrolev/app/commands.hpp"
#include "gyrolev/core/errors.hpp"

namespace {

using namespace gyrolev::app;

// GYROLEV_SEED, GYROLEV_JOBS and GYROLEV_OUT fill the globals unless the
// matching flag is given.
void apply_environment(GlobalOptions& g, bool seed_flag, bool jobs_flag, bool out_flag) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
  };
  try {
    if (const char* v = env("GYROLEV_SEED"); v && !seed_flag) g.seed = std::stoull(v);
    if (const char* v = env("GYROLEV_JOBS"); v && !jobs_flag) g.jobs = std::stoul(v);
  } catch (const std::exception&) {
    throw gyrolev::ConfigError("GYROLEV_SEED / GYROLEV_JOBS must be non-negative integers");
  }
  if (const char* v = env("GYROLEV_OUT"); v && !out_flag) g.out = v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gyroscopic libration of levitated ferromagnets: simulation and Einstein-de Haas analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* jobs_opt = app.add_option("--jobs", global.jobs, "Worker threads, 0 = all cores");
  auto* out_opt = app.add_option("--out", global.out, "Output directory");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Generate trace files from a config");
  simulate->add_option("config", config_path, "JSON run config")->required();

  InferMagnetOptions im;
  auto* infer = app.add_subcommand("infer-magnet", "Radius and magnetization from trap frequencies");
  infer->add_option("--f-z", im.f_z_hz, "Vertical mode frequency (Hz)")->required();
  infer->add_option("--f-beta", im.f_beta_hz, "Measured beta frequency (Hz)")->required();
  infer->add_option("--f-alpha", im.f_alpha_hz, "Alpha frequency (Hz)")->required();
  infer->add_option("--sigma-f", im.sigma_f_rel, "Relative frequency uncertainty");
  infer->add_option("--trap-radius-mm", im.trap_radius_mm, "Cavity radius (mm)");
  infer->add_option("--sigma-trap", im.sigma_trap_rel, "Relative trap radius uncertainty");
  infer->add_option("--density", im.density_kg_per_m3, "Density (kg/m^3)");
  infer->add_option("--sigma-density", im.sigma_density_rel, "Relative density uncertainty");
  infer->add_option("--g0", im.g0_m_per_s2, "Gravitational acceleration (m/s^2)");
  infer->add_option("--samples", im.samples, "Monte Carlo draws");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Infer f_I (and g) from a directory of traces");
  analyze->add_option("trace_dir", an.trace_dir, "Directory with .trace files")->required();
  analyze->add_option("--f-alpha", an.f_alpha_hz, "Alpha frequency guess (Hz); default from traces");
  analyze->add_option("--f-beta", an.f_beta_hz, "Beta frequency guess (Hz); default from traces");
  analyze->add_option("--radius-um", an.radius_um, "Magnet radius for g (um)");
  analyze->add_option("--magnetization", an.magnetization_kA_per_m, "Magnetization for g (kA/m)");
  analyze->add_option("--density", an.density_kg_per_m3, "Density for g (kg/m^3)");
  analyze->add_option("--window-periods", an.window_periods, "Fit only +-N periods of lag");

  EigenmodeOptions em;
  auto* eig = app.add_subcommand("eigenmodes", "Coupled libration frequencies and ellipticities");
  eig->add_option("--f-alpha", em.f_alpha_hz, "Alpha frequency (Hz)");
  eig->add_option("--f-beta", em.f_beta_hz, "Beta frequency (Hz)");
  eig->add_option("--f-I", em.f_I_hz, "Einstein-de Haas frequency (Hz)");
  eig->add_option("--gamma-dot", em.gamma_dot_rad_per_s, "Spin rate about the dipole axis (rad/s)");
  eig->add_option("--eps-alpha", em.eps_alpha, "Inertia cross term");
  eig->add_option("--eps-beta", em.eps_beta, "Inertia cross term");

  ReproduceOptions rp;
  auto* repro = app.add_subcommand("reproduce-table", "Simulate and analyze the four published configurations");
  repro->add_option("--rows", rp.rows, "Rows to run (1-4)")->check(CLI::Range(1, 4));
  repro->add_option("--repetitions-alpha", rp.repetitions_alpha, "Quasi-alpha repetitions per row");
  repro->add_option("--repetitions-beta", rp.repetitions_beta, "Quasi-beta repetitions per row");
  repro->add_option("--duration", rp.duration_s, "Trace length (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  return run_guarded(
      [&]() -> int {
        apply_environment(global, seed_opt->count() > 0, jobs_opt->count() > 0, out_opt->count() > 0);
        if (seed_opt->count() > 0) global.seed = seed;
        if (*simulate) return cmd_simulate(config_path, global, std::cout);
        if (*infer) return cmd_infer_magnet(im, global, std::cout);
        if (*analyze) return cmd_analyze(an, global, std::cout);
        if (*eig) return cmd_eigenmodes(em, std::cout);
        rp.jobs = global.jobs;
        if (global.seed) rp.seed = *global.seed;
        return cmd_reproduce_table(rp, global, std::cout);
      },
      std::cerr);
}
