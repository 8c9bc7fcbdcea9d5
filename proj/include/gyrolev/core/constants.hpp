#pragma once

#include <numbers>

namespace gyrolev {

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
  static constexpr double mu0 = 1.25663706212e-6;            // T m / A
  static constexpr double bohr_magneton = 9.2740100783e-24;  // J / T
  static constexpr double hbar = 1.054571817e-34;            // J s
  static constexpr double boltzmann = 1.380649e-23;          // J / K
  static constexpr double standard_gravity = 9.8067;         // m / s^2, local value
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

}  // namespace gyrolev
