#include "gyrolev/magnetostatics/cavity.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"

namespace gyrolev::magnetostatics {

namespace {

constexpr double kStepZ = 1e-7;     // m
constexpr double kStepBeta = 1e-4;  // rad

// Central second difference of g around 0 (g(0) == 0 by construction),
// with one Richardson extrapolation step.
template <class F>
double second_derivative(F&& g, double h) {
  auto central = [&](double step) { return (g(step) + g(-step)) / (step * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double dipole_strength(const MagnetSpec& magnet) {
  const double mu = magnet.moment();
  return PhysicalConstants::mu0 * mu * mu / (4.0 * std::numbers::pi);
}

}  // namespace

double ModeFrequencies::f_z_hz() const { return angular_to_hz(omega_z); }
double ModeFrequencies::f_beta_hz() const { return angular_to_hz(omega_beta); }

CavityPotential::CavityPotential(const TrapSpec& trap, const MagnetSpec& magnet)
    : a_(trap.radius()),
      g0_(trap.g0()),
      mass_(magnet.mass()),
      inertia_(magnet.inertia()),
      strength_(dipole_strength(magnet)) {}

void CavityPotential::check_height(double z) const {
  if (!(z > 0.0) || !(z < a_)) {
    std::ostringstream msg;
    msg << "magnet outside the cavity interior: height " << z << " m not in (0, " << a_ << ")";
    throw DomainError(msg.str());
  }
}

double CavityPotential::magnetic_energy(double z) const {
  check_height(z);
  const double r = a_ - z;
  const double q = a_ * a_ + r * r;
  const double w = z * (2.0 * a_ - z);  // a^2 - r^2
  const double a5 = a_ * a_ * a_ * a_ * a_;
  return strength_ * a5 / (q * w * w * w);
}

double CavityPotential::energy(double z, double beta) const {
  const double u0 = magnetic_energy(z);
  const double r = a_ - z;
  const double s = std::sin(beta);
  double tilt = 0.0;
  if (s != 0.0) tilt = (a_ * a_) / (r * r) * s * s;
  return u0 * (1.0 + tilt) + mass_ * g0_ * z;
}

double CavityPotential::force_gradient(double z) const {
  check_height(z);
  const double r = a_ - z;
  const double q = a_ * a_ + r * r;
  const double w = z * (2.0 * a_ - z);
  const double a5 = a_ * a_ * a_ * a_ * a_;
  return -strength_ * a5 * 2.0 * r * (3.0 * q - w) / (q * q * w * w * w * w) + mass_ * g0_;
}

double CavityPotential::excess_energy(double z_ref, double dz, double beta) const {
  const double z = z_ref + dz;
  check_height(z_ref);
  check_height(z);
  const double r_ref = a_ - z_ref;
  const double q_ref = a_ * a_ + r_ref * r_ref;
  const double w_ref = z_ref * (2.0 * a_ - z_ref);
  // q(z) - q(z_ref) = -e and w(z) - w(z_ref) = +e exactly.
  const double e = dz * (2.0 * a_ - 2.0 * z_ref - dz);
  const double log_ratio = -std::log1p(-e / q_ref) - 3.0 * std::log1p(e / w_ref);
  const double u_ref = magnetic_energy(z_ref);
  double excess = u_ref * std::expm1(log_ratio) + mass_ * g0_ * dz;
  const double s = std::sin(beta);
  if (s != 0.0) {
    const double r = a_ - z;
    excess += u_ref * std::exp(log_ratio) * (a_ * a_) / (r * r) * s * s;
  }
  return excess;
}

double cavity_potential(const TrapSpec& trap, const MagnetSpec& magnet, double r, double beta) {
  const double a = trap.radius();
  if (!(r > 0.0) || !(r < a)) {
    std::ostringstream msg;
    msg << "radial position " << r << " m outside the cavity interior (0, " << a << ")";
    throw DomainError(msg.str());
  }
  return CavityPotential(trap, magnet).energy(a - r, beta);
}

EquilibriumPoint find_equilibrium(const TrapSpec& trap, const MagnetSpec& magnet) {
  const CavityPotential u(trap, magnet);
  const double a = trap.radius();

  // Geometric scan of the gradient over heights (1e-9 a, a); a minimum is a
  // sign change from negative to positive.
  constexpr int kScan = 400;
  const double z_lo = 1e-9 * a;
  const double z_hi = a * (1.0 - 1e-12);
  const double ratio = std::pow(z_hi / z_lo, 1.0 / kScan);
  std::vector<std::pair<double, double>> brackets;
  double z_prev = z_lo;
  double g_prev = u.force_gradient(z_prev);
  for (int i = 1; i <= kScan; ++i) {
    const double z = (i == kScan) ? z_hi : z_prev * ratio;
    const double g = u.force_gradient(z);
    if (g_prev < 0.0 && g >= 0.0) brackets.emplace_back(z_prev, z);
    z_prev = z;
    g_prev = g;
  }
  if (brackets.empty()) {
    std::ostringstream msg;
    msg << "no stable levitation: dU/dz has no upward zero crossing for heights in [" << z_lo
        << ", " << z_hi << "] m";
    throw DomainError(msg.str());
  }

  double best_z = 0.0;
  double best_u = 0.0;
  for (const auto& [lo, hi] : brackets) {
    std::uintmax_t max_iter = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [left, right] = boost::math::tools::toms748_solve(
        [&](double z) { return u.force_gradient(z); }, lo, hi, tol, max_iter);
    const double z0 = 0.5 * (left + right);
    const double energy = u.energy(z0, 0.0);
    if (best_z == 0.0 || energy < best_u) {
      best_z = z0;
      best_u = energy;
    }
  }
  // The point dipole always floats somewhere; a sphere cannot sit lower than its radius.
  if (best_z <= magnet.radius()) {
    std::ostringstream msg;
    msg << "no stable levitation: equilibrium height " << best_z << " m is below the magnet radius "
        << magnet.radius() << " m";
    throw DomainError(msg.str());
  }
  return {a - best_z, best_z, 0.0};
}

ModeFrequencies mode_frequencies(const TrapSpec& trap, const MagnetSpec& magnet) {
  const CavityPotential u(trap, magnet);
  const EquilibriumPoint eq = find_equilibrium(trap, magnet);
  const double z0 = eq.z0;

  const double k_z =
      second_derivative([&](double dz) { return u.excess_energy(z0, dz, 0.0); }, kStepZ);
  const double k_beta =
      second_derivative([&](double db) { return u.excess_energy(z0, 0.0, db); }, kStepBeta);
  if (!(k_z > 0.0)) throw DomainError("unstable equilibrium: negative curvature along z");
  if (!(k_beta > 0.0)) throw DomainError("unstable equilibrium: negative curvature along beta");
  return {std::sqrt(k_z / u.mass()), std::sqrt(k_beta / u.inertia())};
}

double beta_correction(double f_beta_measured, double f_alpha_measured) {
  if (!(f_alpha_measured >= 0.0) || !(f_beta_measured > f_alpha_measured)) {
    std::ostringstream msg;
    msg << "beta correction needs f_beta > f_alpha >= 0, got f_beta = " << f_beta_measured
        << ", f_alpha = " << f_alpha_measured;
    throw DomainError(msg.str());
  }
  return std::sqrt((f_beta_measured - f_alpha_measured) * (f_beta_measured + f_alpha_measured));
}

double beta_with_residual_field(double f_beta_trap, double f_alpha) {
  if (!(f_beta_trap > 0.0) || !(f_alpha >= 0.0))
    throw DomainError("frequencies must be non-negative with f_beta > 0");
  return std::hypot(f_beta_trap, f_alpha);
}

namespace plane {

double potential(const MagnetSpec& magnet, double g0, double height, double beta) {
  if (!(height > 0.0)) throw DomainError("height above the plane must be > 0");
  const double s = std::sin(beta);
  return dipole_strength(magnet) * (1.0 + s * s) / (16.0 * height * height * height) +
         magnet.mass() * g0 * height;
}

double equilibrium_height(const MagnetSpec& magnet, double g0) {
  return std::pow(3.0 * dipole_strength(magnet) / (16.0 * magnet.mass() * g0), 0.25);
}

ModeFrequencies mode_frequencies(const MagnetSpec& magnet, double g0) {
  const double h = equilibrium_height(magnet, g0);
  const double k = dipole_strength(magnet);
  const double k_z = 3.0 * k / (4.0 * std::pow(h, 5));
  const double k_beta = k / (8.0 * h * h * h);
  return {std::sqrt(k_z / magnet.mass()), std::sqrt(k_beta / magnet.inertia())};
}

RadiusMagnetization invert(double omega_z, double omega_beta, double density, double g0) {
  if (!(omega_z > 0.0) || !(omega_beta > 0.0)) throw DomainError("frequencies must be > 0");
  const double h = 4.0 * g0 / (omega_z * omega_z);
  const double radius = std::sqrt(5.0 * g0 * h / (3.0 * omega_beta * omega_beta));
  const double volume = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  const double m2 = 64.0 * std::numbers::pi * density * g0 * std::pow(h, 4) /
                    (3.0 * PhysicalConstants::mu0 * volume);
  return {radius, std::sqrt(m2)};
}

}  // namespace plane

}  // namespace gyrolev::magnetostatics
