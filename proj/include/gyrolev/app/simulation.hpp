#pragma once

#include <cstdint>
#include <vector>

#include "gyrolev/app/config.hpp"
#include "gyrolev/dynamics/libration.hpp"
#include "gyrolev/signal/traces.hpp"

namespace gyrolev::app {

/// Everything needed to generate repetitions, resolved from a RunConfig.
struct SimulationPlan {
  dynamics::LibrationParams params;
  double f_alpha_hz = 0.0;
  double f_beta_hz = 0.0;     // librational, including the residual field
  double f_beta_trap_hz = 0.0;
  double f_z_hz = 0.0;
  double z0 = 0.0;            // equilibrium height (m)
  double sample_dt = 0.0;
  std::size_t samples = 0;
  /// Integration steps per sample, so the step obeys dt <= 1 / (50 f_max).
  std::size_t substeps = 1;
  signal::MixingMatrix mixing;
  double excitation_rad = 0.0;
  double noise_rms_v = 0.0;
  std::uint64_t seed = 0;
  std::size_t repetitions_alpha = 0;
  std::size_t repetitions_beta = 0;
};

/// Resolves frequencies from the trap model where not given explicitly.
SimulationPlan plan_simulation(const RunConfig& config);

/// One ring-down: thermal initial state plus a single excited eigenmode of
/// amplitude excitation_rad with random phase, Langevin integration,
/// channel mixing and detector noise. Depends only on (plan, mode, index).
signal::TimeTraceSet simulate_repetition(const SimulationPlan& plan, dynamics::ModeKind mode,
                                         std::size_t index);

/// All quasi-alpha repetitions followed by all quasi-beta repetitions.
std::vector<signal::TimeTraceSet> simulate_all(const SimulationPlan& plan, std::size_t jobs);

}  // namespace gyrolev::app
