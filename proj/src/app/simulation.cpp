#include "gyrolev/app/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"
#include "gyrolev/core/parallel.hpp"
#include "gyrolev/dynamics/eigenmodes.hpp"
#include "gyrolev/magnetostatics/cavity.hpp"

namespace gyrolev::app {

using dynamics::ModeKind;

SimulationPlan plan_simulation(const RunConfig& config) {
  config.validate();
  const MagnetSpec magnet = config.magnet_spec();
  const TrapSpec trap = config.trap_spec();
  const auto& lib = config.libration;

  SimulationPlan plan;
  const auto eq = magnetostatics::find_equilibrium(trap, magnet);
  const auto modes = magnetostatics::mode_frequencies(trap, magnet);
  plan.z0 = eq.z0;
  plan.f_z_hz = modes.f_z_hz();
  plan.f_beta_trap_hz = modes.f_beta_hz();
  plan.f_alpha_hz = lib.f_alpha_hz;
  plan.f_beta_hz = lib.f_beta_hz ? *lib.f_beta_hz
                                 : magnetostatics::beta_with_residual_field(plan.f_beta_trap_hz, lib.f_alpha_hz);

  double omega_I = 0.0;
  if (lib.f_I_hz) {
    omega_I = hz_to_angular(*lib.f_I_hz);
  } else {
    const double g = analysis::g_eff_reference(magnet.composition());
    const double spin = magnet.moment() * PhysicalConstants::hbar / (g * PhysicalConstants::bohr_magneton);
    omega_I = dynamics::einstein_de_haas_frequency(spin, magnet.inertia());
  }

  auto& p = plan.params;
  p.omega_alpha = hz_to_angular(plan.f_alpha_hz);
  p.omega_beta = hz_to_angular(plan.f_beta_hz);
  p.omega_I = omega_I;
  p.gamma_dot = lib.gamma_dot_rad_per_s;
  p.eps_alpha = lib.eps_alpha;
  p.eps_beta = lib.eps_beta;
  p.damping_alpha = 1.0 / lib.damping_time_s;
  p.damping_beta = 1.0 / lib.damping_time_s;
  p.temperature = lib.temperature_k;
  p.inertia = magnet.inertia();
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("libration: ") + e.what());
  }

  const auto& acq = config.acquisition;
  plan.sample_dt = 1.0 / acq.sample_rate_hz;
  plan.samples = static_cast<std::size_t>(std::llround(acq.duration_s * acq.sample_rate_hz));
  const double f_max = std::max(plan.f_alpha_hz, plan.f_beta_hz);
  plan.substeps = static_cast<std::size_t>(std::ceil(plan.sample_dt * 50.0 * f_max * (1.0 - 1e-12)));
  plan.substeps = std::max<std::size_t>(plan.substeps, 1);
  plan.mixing = config.mixing;
  plan.excitation_rad = acq.excitation_rad;
  plan.noise_rms_v = acq.noise_rms_v;
  plan.seed = acq.seed;
  plan.repetitions_alpha = acq.repetitions_alpha;
  plan.repetitions_beta = acq.repetitions_beta;

  // Same rule as the trace validation: at least 25 periods of the slower mode.
  if (acq.duration_s * plan.f_alpha_hz < 25.0)
    throw ConfigError("acquisition.duration_s: shorter than 25 periods of the alpha mode");
  return plan;
}

signal::TimeTraceSet simulate_repetition(const SimulationPlan& plan, ModeKind mode, std::size_t index) {
  const bool alpha = mode == ModeKind::QuasiAlpha;
  const std::uint64_t rep_seed = derive_seed(plan.seed, alpha ? 1 : 2, index);
  const auto& p = plan.params;

  dynamics::LibrationState init = draw_thermal_state(p, derive_seed(rep_seed, 1));
  std::mt19937_64 phase_rng(derive_seed(rep_seed, 2));
  const double phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(phase_rng);
  const auto modes = dynamics::eigenmodes(p);
  const auto kick = dynamics::excite_mode(modes[alpha ? 0 : 1], plan.excitation_rad, phase);
  init.alpha += kick.alpha;
  init.beta += kick.beta;
  init.alpha_dot += kick.alpha_dot;
  init.beta_dot += kick.beta_dot;
  init.t = 0.0;

  const double dt = plan.sample_dt / static_cast<double>(plan.substeps);
  const double duration = static_cast<double>(plan.samples - 1) * plan.sample_dt;
  auto traj = dynamics::linearized_integrate(p, init, dt, duration, derive_seed(rep_seed, 3), plan.substeps);
  traj.resize(plan.samples);

  auto traces = signal::mix_channels(traj, plan.mixing);
  traces.dt = plan.sample_dt;
  if (plan.noise_rms_v > 0.0)
    signal::add_measurement_noise(traces, plan.noise_rms_v, plan.noise_rms_v, derive_seed(rep_seed, 4));

  traces.meta.mode_excited = mode;
  traces.meta.f_alpha_hz = plan.f_alpha_hz;
  traces.meta.f_beta_hz = plan.f_beta_hz;
  traces.meta.seed = rep_seed;
  char label[32];
  std::snprintf(label, sizeof label, "%s_%04zu", alpha ? "alpha" : "beta", index);
  traces.meta.label = label;
  traces.validate_span(25.0);
  return traces;
}

std::vector<signal::TimeTraceSet> simulate_all(const SimulationPlan& plan, std::size_t jobs) {
  const std::size_t total = plan.repetitions_alpha + plan.repetitions_beta;
  std::vector<signal::TimeTraceSet> out(total);
  parallel_for(total, jobs, [&](std::size_t i) {
    out[i] = i < plan.repetitions_alpha
                 ? simulate_repetition(plan, ModeKind::QuasiAlpha, i)
                 : simulate_repetition(plan, ModeKind::QuasiBeta, i - plan.repetitions_alpha);
  });
  return out;
}

}  // namespace gyrolev::app
