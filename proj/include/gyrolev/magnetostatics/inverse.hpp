#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/uncertain.hpp"

namespace gyrolev::magnetostatics {

/// Known-but-uncertain inputs to the (R, M) inversion. Defaults are the
/// manufacturer density (5 %) and machined trap radius (10 %).
struct InferencePriors {
  Uncertain trap_radius = Uncertain::relative(2.5e-3, 0.10);  // m
  Uncertain density = Uncertain::relative(7430.0, 0.05);      // kg/m^3
  double g0 = PhysicalConstants::standard_gravity;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

struct MagnetSample {
  double radius;
  double magnetization;
  double density;
};

struct MagnetEstimate {
  Uncertain radius;         // m
  Uncertain magnetization;  // A/m
  double relative_residual; // of the central solve
  int iterations;
  /// Joint Monte Carlo draws; keeps the R-M-rho correlations for
  /// downstream propagation. Empty when every input sigma is zero.
  std::vector<MagnetSample> samples;
};

/// Solves mode_frequencies(trap, {R, M, rho}) = (omega_z, omega_beta) for
/// (R, M) by damped Newton in (log R, log M), starting from the plane-model
/// estimate. Uncertainties come from Monte Carlo over (omega_z, omega_beta,
/// a, rho). Frequencies in rad/s; omega_beta must already be corrected for
/// the residual field.
MagnetEstimate infer_magnet(const Uncertain& omega_z, const Uncertain& omega_beta_corrected,
                            const InferencePriors& priors = {});

/// Central solve only, for a fixed parameter set.
struct InverseSolution {
  double radius;
  double magnetization;
  double relative_residual;
  int iterations;
};
InverseSolution solve_radius_magnetization(double omega_z, double omega_beta, double trap_radius,
                                           double density, double g0);

/// d(omega_z, omega_beta)/d(log R, log M) by central differences, step 1e-6.
/// Row-major 2x2: {dwz/dlnR, dwz/dlnM, dwb/dlnR, dwb/dlnM}.
std::array<double, 4> forward_jacobian(double radius, double magnetization, double trap_radius,
                                       double density, double g0, double log_step = 1e-6);

}  // namespace gyrolev::magnetostatics
