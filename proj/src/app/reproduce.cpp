#include "gyrolev/app/reproduce.hpp"

#include <chrono>
#include <cmath>

#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/parallel.hpp"
#include "gyrolev/magnetostatics/cavity.hpp"

namespace gyrolev::app {

RunConfig reference_config(const ReferenceRow& row, const ReproduceOptions& options) {
  RunConfig c;
  c.magnet.radius_um = row.radius_um;
  c.magnet.magnetization_kA_per_m = row.magnetization_kA_per_m;
  c.magnet.density_kg_per_m3 = kReferenceDensity;
  c.trap.radius_mm = kReferenceTrapRadius * 1e3;
  c.libration.f_alpha_hz = kReferenceFAlphaHz;
  c.libration.f_I_hz = row.f_I_hz;
  c.libration.temperature_k = kReferenceTemperature;
  c.acquisition.duration_s = options.duration_s;
  c.acquisition.repetitions_alpha = options.repetitions_alpha;
  c.acquisition.repetitions_beta = options.repetitions_beta;
  c.acquisition.noise_rms_v = options.noise_rms_v;
  c.acquisition.seed = derive_seed(options.seed, 0x7ab1e, static_cast<std::uint64_t>(row.row));
  c.mixing = options.mixing;
  return c;
}

bool agrees(const Uncertain& a, const Uncertain& b, double n_sigma) {
  return std::abs(a.value() - b.value()) < n_sigma * std::hypot(a.sigma(), b.sigma());
}

RowOutcome reproduce_row(const ReferenceRow& row, const ReproduceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RowOutcome out;
  out.reference = row;
  const RunConfig config = reference_config(row, options);
  out.plan = plan_simulation(config);
  const auto traces = simulate_all(out.plan, options.jobs);

  analysis::AnalysisOptions ao;
  ao.jobs = options.jobs;
  out.analysis = analysis::analyze_repetitions(traces, out.plan.params.omega_alpha, out.plan.params.omega_beta, ao);
  const auto& inf = out.analysis.inference;

  out.f_I_injected = Uncertain(row.f_I_hz);
  out.f_I_recovered = std::abs(inf.f_I.value() - row.f_I_hz) < 3.0 * inf.f_I.sigma();
  out.f_I_matches = agrees(inf.f_I, Uncertain(row.f_I_hz, row.f_I_sigma_hz));

  // The trap inversion sees the fitted libration frequencies with the
  // cooldown-to-cooldown reproducibility as their uncertainty.
  const double wa = out.analysis.omega_alpha.mean.value();
  const double wb = magnetostatics::beta_correction(out.analysis.omega_beta.mean.value(), wa);
  magnetostatics::InferencePriors priors;
  priors.seed = derive_seed(config.acquisition.seed, 0x1a7);
  out.magnet = magnetostatics::infer_magnet(Uncertain::relative(hz_to_angular(out.plan.f_z_hz), 0.01),
                                            Uncertain::relative(wb, 0.01), priors);
  out.g = analysis::g_factor_monte_carlo(out.magnet.samples, out.magnet.magnetization, out.magnet.radius,
                                         priors.density.value(), inf.omega_I, derive_seed(priors.seed, 2));

  out.radius_matches = agrees(out.magnet.radius.scaled(1e6), Uncertain(row.radius_um, row.radius_sigma_um));
  out.magnetization_matches = agrees(out.magnet.magnetization.scaled(1e-3),
                                     Uncertain(row.magnetization_kA_per_m, row.magnetization_sigma_kA_per_m));
  out.g_matches = agrees(out.g, Uncertain(row.g, row.g_sigma));
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace gyrolev::app
