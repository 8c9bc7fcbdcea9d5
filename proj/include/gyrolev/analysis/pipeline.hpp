#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gyrolev/analysis/fit.hpp"
#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/dynamics/libration.hpp"
#include "gyrolev/signal/traces.hpp"

namespace gyrolev::analysis {

struct AnalysisOptions {
  int max_iterations = 200;
  /// Fit |tau| within this many periods of the mode; full lag domain when empty.
  std::optional<double> window_periods;
  std::size_t jobs = 1;
  /// Abort when a larger fraction of either mode's repetitions fails to fit.
  double max_failure_fraction = 0.2;
};

/// One repetition: the excited channel's autocorrelation (C11 for
/// quasi-alpha, C22 for quasi-beta) and the cross-correlation (C12 / C21).
struct TraceAnalysis {
  dynamics::ModeKind mode = dynamics::ModeKind::QuasiAlpha;
  CorrelationFit main_auto;
  CorrelationFit cross;
  PhaseComponents main_pc;
  PhaseComponents cross_pc;
  double r = 0.0;
};

TraceAnalysis analyze_trace(const signal::TimeTraceSet& trace, double omega_guess,
                            const AnalysisOptions& options = {});

struct PipelineResult {
  InferenceResult inference;
  RepetitionStats r_alpha;
  RepetitionStats r_beta;
  RepetitionStats phi_alpha;    // cross-correlation phase per repetition
  RepetitionStats phi_beta;
  RepetitionStats omega_alpha;  // fitted autocorrelation frequencies
  RepetitionStats omega_beta;
  std::vector<TraceAnalysis> alpha;  // successful repetitions, input order
  std::vector<TraceAnalysis> beta;
  std::size_t failed_alpha = 0;
  std::size_t failed_beta = 0;
  std::vector<std::string> diagnostics;
};

/// Splits traces by excited mode, analyzes each, aggregates r over
/// repetitions (mean +- SEM) and forms omega_I from them and the mean fitted
/// mode frequencies. omega_alpha, omega_beta (rad/s) only seed the fits. The reduction
/// runs in input order, so results do not depend on `jobs`.
PipelineResult analyze_repetitions(std::span<const signal::TimeTraceSet> traces, double omega_alpha,
                                   double omega_beta, const AnalysisOptions& options = {});

}  // namespace gyrolev::analysis
