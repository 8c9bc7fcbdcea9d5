#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <functional>
#include <vector>

#include "gyrolev/core/magnet.hpp"
#include "gyrolev/dynamics/libration.hpp"

namespace gyrolev::dynamics {

using Vec3 = Eigen::Vector3d;

/// Orientation (easy axis), angular velocity and intrinsic angular momentum
/// magnitude of a rigid hard ferromagnet with isotropic inertia.
struct RigidBodyState {
  Vec3 n_hat = Vec3::UnitX();
  Vec3 omega = Vec3::Zero();
  double spin = 0.0;  // J s
  double t = 0.0;
};

using TorqueModel = std::function<Vec3(const Vec3& n_hat)>;

/// Conservative restoring torque for the two librations about the x-directed
/// equilibrium, from U = I/2 (wa^2 n_y^2 + wb^2 n_z^2). Small angles give
/// T_z = -I wa^2 alpha and T_y = +I wb^2 beta.
struct HarmonicTorque {
  double inertia;
  double omega_alpha;
  double omega_beta;

  Vec3 operator()(const Vec3& n) const;
  double potential(const Vec3& n) const;
};

inline TorqueModel torque_free() {
  return [](const Vec3&) { return Vec3::Zero(); };
}

/// Integrates I dOmega/dt + Omega x S n = T, dn/dt = Omega x n with RK4,
/// renormalizing n after each step. Output every `stride` steps.
std::vector<RigidBodyState> rigid_body_integrate(double inertia, const TorqueModel& torque,
                                                 const RigidBodyState& initial, double dt,
                                                 double duration, std::size_t stride = 1);

std::vector<RigidBodyState> rigid_body_integrate(const MagnetSpec& magnet,
                                                 const TorqueModel& torque,
                                                 const RigidBodyState& initial, double dt,
                                                 double duration, std::size_t stride = 1);

Vec3 total_angular_momentum(const RigidBodyState& state, double inertia);
double kinetic_energy(const RigidBodyState& state, double inertia);

/// Maps libration angles to n = (cos b cos a, cos b sin a, sin b) and
/// Omega = n x dn/dt + gamma_dot n.
RigidBodyState from_libration(const LibrationState& state, double spin, double gamma_dot = 0.0);

/// alpha = atan2(n_y, n_x), beta = asin(n_z); rates from Omega x n.
LibrationState to_libration(const RigidBodyState& state);

}  // namespace gyrolev::dynamics
