#include "gyrolev/analysis/pipeline.hpp"

#include <cmath>
#include <optional>

#include "gyrolev/analysis/correlation.hpp"
#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"
#include "gyrolev/core/parallel.hpp"

namespace gyrolev::analysis {
namespace {

using dynamics::ModeKind;

struct Slot {
  std::optional<TraceAnalysis> result;
  std::string error;
};

std::vector<double> collect(const std::vector<TraceAnalysis>& v, double (*get)(const TraceAnalysis&)) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& t : v) out.push_back(get(t));
  return out;
}

}  // namespace

TraceAnalysis analyze_trace(const signal::TimeTraceSet& trace, double omega_guess,
                            const AnalysisOptions& options) {
  trace.validate();
  const bool alpha = trace.meta.mode_excited == ModeKind::QuasiAlpha;
  const auto& main = alpha ? trace.v1 : trace.v2;
  const auto& other = alpha ? trace.v2 : trace.v1;

  FitOptions fo;
  fo.max_iterations = options.max_iterations;
  if (options.window_periods) fo.window = periods_window(omega_guess, *options.window_periods);

  TraceAnalysis out;
  out.mode = trace.meta.mode_excited;
  const auto auto_series = correlate(main, main, trace.dt);
  out.main_auto = fit_correlation(auto_series, omega_guess, fo);
  // Seed the cross fit at the autocorrelation's frequency.
  const auto cross_series = correlate(main, other, trace.dt);
  out.cross = fit_correlation(cross_series, out.main_auto.omega, fo);
  out.main_pc = phase_components(out.main_auto);
  out.cross_pc = phase_components(out.cross);
  out.r = r_factor(out.cross_pc, out.main_pc);
  return out;
}

PipelineResult analyze_repetitions(std::span<const signal::TimeTraceSet> traces, double omega_alpha,
                                   double omega_beta, const AnalysisOptions& options) {
  std::vector<Slot> slots(traces.size());
  parallel_for(traces.size(), options.jobs, [&](std::size_t i) {
    const bool alpha = traces[i].meta.mode_excited == ModeKind::QuasiAlpha;
    try {
      slots[i].result = analyze_trace(traces[i], alpha ? omega_alpha : omega_beta, options);
    } catch (const ConvergenceError& e) {
      slots[i].error = e.what();
    } catch (const AnalysisError& e) {
      slots[i].error = e.what();
    }
  });

  PipelineResult out;
  std::size_t total_alpha = 0, total_beta = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const bool alpha = traces[i].meta.mode_excited == ModeKind::QuasiAlpha;
    (alpha ? total_alpha : total_beta)++;
    if (slots[i].result) {
      (alpha ? out.alpha : out.beta).push_back(*slots[i].result);
    } else {
      (alpha ? out.failed_alpha : out.failed_beta)++;
      const std::string label = traces[i].meta.label.empty() ? "#" + std::to_string(i) : traces[i].meta.label;
      out.diagnostics.push_back(label + ": " + slots[i].error);
    }
  }
  if (total_alpha == 0) throw AnalysisError("no quasi-alpha traces");
  if (total_beta == 0) throw AnalysisError("no quasi-beta traces");
  auto too_many = [&](std::size_t failed, std::size_t total) {
    return static_cast<double>(failed) > options.max_failure_fraction * static_cast<double>(total);
  };
  if (too_many(out.failed_alpha, total_alpha) || too_many(out.failed_beta, total_beta)) {
    std::string msg = "fit failures: " + std::to_string(out.failed_alpha) + "/" +
                      std::to_string(total_alpha) + " quasi-alpha, " + std::to_string(out.failed_beta) +
                      "/" + std::to_string(total_beta) + " quasi-beta";
    for (std::size_t i = 0; i < out.diagnostics.size() && i < 5; ++i) msg += "\n  " + out.diagnostics[i];
    throw AnalysisError(msg);
  }

  out.r_alpha = aggregate_repetitions(collect(out.alpha, [](const TraceAnalysis& t) { return t.r; }));
  out.r_beta = aggregate_repetitions(collect(out.beta, [](const TraceAnalysis& t) { return t.r; }));
  out.phi_alpha = aggregate_repetitions(collect(out.alpha, [](const TraceAnalysis& t) { return t.cross.phi; }));
  out.phi_beta = aggregate_repetitions(collect(out.beta, [](const TraceAnalysis& t) { return t.cross.phi; }));
  out.omega_alpha =
      aggregate_repetitions(collect(out.alpha, [](const TraceAnalysis& t) { return t.main_auto.omega; }));
  out.omega_beta =
      aggregate_repetitions(collect(out.beta, [](const TraceAnalysis& t) { return t.main_auto.omega; }));

  auto& inf = out.inference;
  inf.r_alpha = out.r_alpha.mean;
  inf.r_beta = out.r_beta.mean;
  inf.product = r_product(inf.r_alpha, inf.r_beta);
  inf.omega_I = omega_I_from_r(inf.r_alpha, inf.r_beta, out.omega_alpha.mean.value(),
                               out.omega_beta.mean.value());
  inf.f_I = inf.omega_I.scaled(1.0 / kTwoPi);
  inf.n_alpha = out.alpha.size();
  inf.n_beta = out.beta.size();
  return out;
}

}  // namespace gyrolev::analysis
