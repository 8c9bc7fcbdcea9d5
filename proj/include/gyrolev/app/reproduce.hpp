#pragma once

#include <cstdint>
#include <vector>

#include "gyrolev/analysis/pipeline.hpp"
#include "gyrolev/app/reference.hpp"
#include "gyrolev/app/simulation.hpp"
#include "gyrolev/magnetostatics/inverse.hpp"

namespace gyrolev::app {

struct ReproduceOptions {
  std::vector<int> rows{1, 2, 3, 4};
  std::size_t repetitions_alpha = 128;
  std::size_t repetitions_beta = 64;
  double duration_s = 0.5;
  double noise_rms_v = 1e-4;
  signal::MixingMatrix mixing{1.0, 0.03, 0.03, 1.0};
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

/// Config for one published row: its R and M, the reference density, trap
/// and temperature, f_alpha = 100 Hz and f_I injected from the published value.
RunConfig reference_config(const ReferenceRow& row, const ReproduceOptions& options);

/// |a - b| < 3 sqrt(sa^2 + sb^2)
bool agrees(const Uncertain& a, const Uncertain& b, double n_sigma = 3.0);

struct RowOutcome {
  ReferenceRow reference;
  SimulationPlan plan;
  analysis::PipelineResult analysis;
  magnetostatics::MagnetEstimate magnet;
  Uncertain g;
  Uncertain f_I_injected;  // published value, zero sigma
  bool f_I_recovered = false;  // vs injected, 3 sigma of the recovered value
  bool f_I_matches = false;    // vs published, 3 combined sigma
  bool radius_matches = false;
  bool magnetization_matches = false;
  bool g_matches = false;
  double seconds = 0.0;

  bool pass() const {
    return f_I_recovered && f_I_matches && radius_matches && magnetization_matches && g_matches;
  }
};

/// Simulate, analyze, invert the mean fitted frequencies for (R, M) and
/// form g for one row. f_z enters the inversion from the trap model with
/// the 1 % frequency uncertainty; f_beta is the fitted quasi-beta frequency.
RowOutcome reproduce_row(const ReferenceRow& row, const ReproduceOptions& options);

}  // namespace gyrolev::app
