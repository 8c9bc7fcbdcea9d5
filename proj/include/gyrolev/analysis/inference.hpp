#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gyrolev/analysis/fit.hpp"
#include "gyrolev/core/magnet.hpp"
#include "gyrolev/core/uncertain.hpp"
#include "gyrolev/magnetostatics/inverse.hpp"

namespace gyrolev::analysis {

/// s_cross / c_auto for one excited mode: r_alpha = s12 / c11,
/// r_beta = s21 / c22. Throws AnalysisError if the main-channel
/// autocorrelation has no in-phase part (mode not excited).
double r_factor(const PhaseComponents& cross, const PhaseComponents& main_auto);

/// Product of the two r-factors with its first-order uncertainty.
Uncertain r_product(const Uncertain& r_alpha, const Uncertain& r_beta);

/// omega_I = sqrt(r_alpha r_beta) |wb^2 - wa^2| / sqrt(wa wb).
/// A product more than 3 sigma below zero throws AnalysisError; a product
/// consistent with zero is clamped at zero. The uncertainty is the
/// half-width of the +-1 sigma product interval mapped through the square
/// root (first-order propagation when the product is well resolved).
Uncertain omega_I_from_r(const Uncertain& r_alpha, const Uncertain& r_beta, double omega_alpha,
                         double omega_beta);

/// g = (mu / muB) / (S / hbar), first-order propagation.
Uncertain g_factor(const Uncertain& moment, const Uncertain& spin);

/// g from sphere parameters with S = I omega_I, I = 2/5 m R^2.
Uncertain g_factor_from_magnet(const Uncertain& magnetization, const Uncertain& radius,
                               const Uncertain& density, const Uncertain& omega_I);

/// Same, propagated over joint (R, M, rho) draws from the inversion, so the
/// correlations between them are kept. omega_I is drawn independently.
Uncertain g_factor_monte_carlo(std::span<const magnetostatics::MagnetSample> samples,
                               const Uncertain& magnetization, const Uncertain& radius,
                               double density, const Uncertain& omega_I, std::uint64_t seed);

/// sum n_i g_i S_i / sum n_i S_i
double g_eff_reference(const IonComposition& composition);

struct RepetitionStats {
  Uncertain mean;  // mean +/- standard error of the mean
  double stddev = 0.0;
  std::vector<double> values;
};

/// Mean and standard error over repetitions; n >= 2.
RepetitionStats aggregate_repetitions(std::span<const double> values);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> values, std::size_t bins);

/// Final values of the measurement chain.
struct InferenceResult {
  Uncertain r_alpha;
  Uncertain r_beta;
  Uncertain product;  // r_alpha r_beta
  Uncertain omega_I;  // rad/s
  Uncertain f_I;      // Hz
  std::optional<Uncertain> g;  // when magnet parameters are known
  std::size_t n_alpha = 0;
  std::size_t n_beta = 0;

  /// product / sigma(product); f_I is consistent with zero when below 3.
  double product_significance() const;
};

}  // namespace gyrolev::analysis
