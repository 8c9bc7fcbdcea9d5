#pragma once

#include <Eigen/Core>
#include <optional>

#include "gyrolev/analysis/correlation.hpp"

namespace gyrolev::analysis {

/// f(tau) = A0 (1 - A1 |tau|) cos(omega tau + phi), with A0 > 0 and
/// phi in (-pi, pi].
struct CorrelationFit {
  double a0 = 0.0;
  double a1 = 0.0;     // 1/s
  double omega = 0.0;  // rad/s
  double phi = 0.0;    // rad
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // order (A0, A1, omega, phi)
  double residual_rms = 0.0;
  int iterations = 0;
  std::size_t points = 0;
  bool low_signal = false;      // A0 within 3 sigma of zero
  bool envelope_valid = true;   // 1 - A1 |tau| >= 0 over the fitted window

  double sigma(int i) const;
  double evaluate(double tau) const;
};

struct FitOptions {
  int max_iterations = 200;
  /// Fit only |tau| <= window (s); the full lag domain when empty.
  std::optional<double> window;
};

/// Levenberg-Marquardt fit of the envelope-cosine model. Starts from the
/// spectral peak within +-20 % of omega_guess, A1 = 1 / (N dt), and (A0, phi)
/// from a linear least-squares solve at that frequency. Covariance is
/// s^2 (J^T J)^-1 at the solution. Throws ConvergenceError when the
/// iteration limit is hit.
CorrelationFit fit_correlation(const CorrelationSeries& series, double omega_guess,
                               const FitOptions& options = {});

/// Window half-width covering `periods` oscillation periods.
inline double periods_window(double omega, double periods) {
  return periods * 2.0 * 3.14159265358979323846 / omega;
}

/// In-phase and out-of-phase parts of a fitted correlation,
/// c = A0 cos(phi), s = -A0 sin(phi).
struct PhaseComponents {
  double c = 0.0;
  double s = 0.0;
  double sigma_c = 0.0;
  double sigma_s = 0.0;
};

PhaseComponents phase_components(const CorrelationFit& fit);

}  // namespace gyrolev::analysis
