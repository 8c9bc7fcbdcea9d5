#pragma once

#include <array>
#include <complex>

#include "gyrolev/dynamics/libration.hpp"

namespace gyrolev::dynamics {

/// One normal mode of the linearized libration model, written with the
/// phasor convention q(t) = Re(Q exp(lambda t)), lambda = -decay + i omega.
struct Eigenmode {
  ModeKind which;
  double omega;       // rad/s
  double decay_rate;  // 1/s
  /// Q_secondary / Q_primary. For the undamped isotropic model this is
  /// i * g with g the quasi-mode ellipticity.
  std::complex<double> secondary_ratio;

  double ellipticity() const { return std::abs(secondary_ratio); }
  double phase() const { return std::arg(secondary_ratio); }
};

/// Both modes, ordered {quasi-alpha, quasi-beta}. Roots of the full
/// characteristic quartic (including damping and the eps terms), polished
/// by Newton iteration.
std::array<Eigenmode, 2> eigenmodes(const LibrationParams& params);

/// (wa^2 - w^2)(wb^2 - w^2) - (wI + gd)^2 w^2
double characteristic_residual(const LibrationParams& params, double omega);

/// Initial state exciting a single mode with primary angle
/// amplitude * sin(omega t + phase).
LibrationState excite_mode(const Eigenmode& mode, double amplitude, double phase);

}  // namespace gyrolev::dynamics
