#pragma once

#include "gyrolev/core/magnet.hpp"

namespace gyrolev::magnetostatics {

struct EquilibriumPoint {
  double r0;     // distance from cavity center (m)
  double z0;     // height above the cavity bottom, a - r0 (m)
  double beta0;  // tilt out of the horizontal plane (rad)
};

/// Trap mode frequencies in rad/s.
struct ModeFrequencies {
  double omega_z;
  double omega_beta;

  double f_z_hz() const;
  double f_beta_hz() const;
};

/// Image-method energy of a horizontal dipole inside a spherical
/// superconducting cavity, plus gravity:
///
///   U = mu0 mu^2 / (4 pi) * a^5 / ((a^2 + r^2)(a^2 - r^2)^3) * (1 + a^2/r^2 sin^2 beta)
///       + m g0 (a - r)
///
/// Internally parameterized by the height z = a - r above the bottom so that
/// large cavities (a >> z) do not lose precision in a^2 - r^2.
class CavityPotential {
 public:
  CavityPotential(const TrapSpec& trap, const MagnetSpec& magnet);

  /// Total energy at height z and tilt beta. Requires 0 < z < a.
  double energy(double z, double beta) const;

  /// Magnetic part only, at beta = 0.
  double magnetic_energy(double z) const;

  /// dU/dz at beta = 0 (analytic).
  double force_gradient(double z) const;

  /// U(z_ref + dz, beta) - U(z_ref, 0), evaluated without the catastrophic
  /// cancellation of subtracting two nearly equal energies.
  double excess_energy(double z_ref, double dz, double beta) const;

  double cavity_radius() const noexcept { return a_; }
  double mass() const noexcept { return mass_; }
  double inertia() const noexcept { return inertia_; }

 private:
  void check_height(double z) const;

  double a_;
  double g0_;
  double mass_;
  double inertia_;
  double strength_;  // mu0 mu^2 / (4 pi)
};

/// Energy at distance r from the cavity center. Throws DomainError outside
/// 0 < r < a.
double cavity_potential(const TrapSpec& trap, const MagnetSpec& magnet, double r, double beta);

/// Strict local minimum of U along r at beta = 0. Throws DomainError
/// ("no stable levitation") when none exists in the cavity or when it lies
/// closer to the bottom than the magnet radius.
EquilibriumPoint find_equilibrium(const TrapSpec& trap, const MagnetSpec& magnet);

/// Vertical and beta-libration frequencies from numerical second derivatives
/// of U at the equilibrium (central differences, one Richardson step,
/// h_z = 1e-7 m, h_beta = 1e-4 rad).
ModeFrequencies mode_frequencies(const TrapSpec& trap, const MagnetSpec& magnet);

/// Removes the residual-field contribution from a measured beta frequency:
/// sqrt(f_beta^2 - f_alpha^2). Unit-agnostic (Hz or rad/s in, same out).
double beta_correction(double f_beta_measured, double f_alpha_measured);

/// Inverse of beta_correction: the librational beta frequency the
/// oscillator shows once the alpha-trapping field is present.
double beta_with_residual_field(double f_beta_trap, double f_alpha);

// Infinite superconducting plane, the large-cavity limit.
namespace plane {

/// Image-dipole energy mu0 mu^2 (1 + sin^2 beta) / (64 pi h^3) + m g0 h.
double potential(const MagnetSpec& magnet, double g0, double height, double beta);
double equilibrium_height(const MagnetSpec& magnet, double g0);
ModeFrequencies mode_frequencies(const MagnetSpec& magnet, double g0);

/// Closed-form (R, M) from the two trap frequencies in the plane model.
struct RadiusMagnetization {
  double radius;
  double magnetization;
};
RadiusMagnetization invert(double omega_z, double omega_beta, double density, double g0);

}  // namespace plane

}  // namespace gyrolev::magnetostatics
