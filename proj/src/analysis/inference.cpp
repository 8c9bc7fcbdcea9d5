#include "gyrolev/analysis/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"

namespace gyrolev::analysis {
namespace {

double g_from_sphere(double magnetization, double radius, double density, double omega_I) {
  // mu / S = M V / (2/5 rho V R^2 omega_I)
  return magnetization * PhysicalConstants::hbar /
         (0.4 * density * radius * radius * omega_I * PhysicalConstants::bohr_magneton);
}

}  // namespace

double r_factor(const PhaseComponents& cross, const PhaseComponents& main_auto) {
  if (!(main_auto.c != 0.0) || !std::isfinite(main_auto.c))
    throw AnalysisError("main-channel autocorrelation has no in-phase part; mode not excited");
  return cross.s / main_auto.c;
}

Uncertain r_product(const Uncertain& r_alpha, const Uncertain& r_beta) {
  return r_alpha * r_beta;
}

Uncertain omega_I_from_r(const Uncertain& r_alpha, const Uncertain& r_beta, double omega_alpha,
                         double omega_beta) {
  if (!(omega_alpha > 0.0) || !(omega_beta > 0.0))
    throw DomainError("libration frequencies must be positive");
  if (omega_alpha == omega_beta) throw DomainError("degenerate libration frequencies");
  const Uncertain p = r_product(r_alpha, r_beta);
  if (p.value() < -3.0 * p.sigma())
    throw AnalysisError("r_alpha r_beta is significantly negative: sign or physics inconsistency");
  const double k = std::abs(omega_beta * omega_beta - omega_alpha * omega_alpha) /
                   std::sqrt(omega_alpha * omega_beta);
  const double mag = std::max(p.value(), 0.0);
  const double hi = std::sqrt(mag + p.sigma());
  const double lo = std::sqrt(std::max(mag - p.sigma(), 0.0));
  return Uncertain(k * std::sqrt(mag), 0.5 * k * (hi - lo));
}

Uncertain g_factor(const Uncertain& moment, const Uncertain& spin) {
  if (!(moment.value() > 0.0) || !(spin.value() > 0.0))
    throw DomainError("g_factor needs positive moment and spin");
  const Uncertain muB(PhysicalConstants::bohr_magneton);
  const Uncertain hbar(PhysicalConstants::hbar);
  return (moment / muB) / (spin / hbar);
}

Uncertain g_factor_from_magnet(const Uncertain& magnetization, const Uncertain& radius,
                               const Uncertain& density, const Uncertain& omega_I) {
  if (!(magnetization.value() > 0.0) || !(radius.value() > 0.0) || !(density.value() > 0.0) ||
      !(omega_I.value() > 0.0))
    throw DomainError("g_factor needs positive M, R, rho and omega_I");
  const std::vector<Uncertain> in{magnetization, radius, density, omega_I};
  return uncertain_combine(
      [](std::span<const double> x) { return g_from_sphere(x[0], x[1], x[2], x[3]); }, in);
}

Uncertain g_factor_monte_carlo(std::span<const magnetostatics::MagnetSample> samples,
                               const Uncertain& magnetization, const Uncertain& radius,
                               double density, const Uncertain& omega_I, std::uint64_t seed) {
  if (samples.empty()) return g_factor_from_magnet(magnetization, radius, Uncertain(density), omega_I);
  if (!(omega_I.value() > 0.0)) throw DomainError("g_factor needs positive omega_I");
  const double central = g_from_sphere(magnetization.value(), radius.value(), density, omega_I.value());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    const double w = omega_I.value() + omega_I.sigma() * unit(rng);
    if (!(w > 0.0)) continue;
    const double g = g_from_sphere(s.magnetization, s.radius, s.density, w);
    ++n;
    const double delta = g - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (g - mean);
  }
  if (n < 2) throw AnalysisError("too few valid Monte Carlo draws for g");
  return Uncertain(central, std::sqrt(m2 / static_cast<double>(n - 1)));
}

double g_eff_reference(const IonComposition& composition) {
  double num = 0.0, den = 0.0;
  for (const auto& ion : composition.ions()) {
    num += ion.count * ion.g * ion.spin;
    den += ion.count * ion.spin;
  }
  return num / den;
}

RepetitionStats aggregate_repetitions(std::span<const double> values) {
  if (values.size() < 2) throw AnalysisError("aggregate_repetitions needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  RepetitionStats r;
  r.stddev = std::sqrt(ss / (n - 1.0));
  r.mean = Uncertain(mean, r.stddev / std::sqrt(n));
  r.values.assign(values.begin(), values.end());
  return r;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (values.empty()) throw std::invalid_argument("histogram of no values");
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(idx, bins - 1)]++;
  }
  return h;
}

double InferenceResult::product_significance() const {
  return product.sigma() > 0.0 ? product.value() / product.sigma()
                               : (product.value() == 0.0 ? 0.0 : INFINITY);
}

}  // namespace gyrolev::analysis
