#include "gyrolev/dynamics/rigid_body.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::dynamics {

Vec3 HarmonicTorque::operator()(const Vec3& n) const {
  const double ka = inertia * omega_alpha * omega_alpha;
  const double kb = inertia * omega_beta * omega_beta;
  // T = -n x dU/dn
  return {-(kb - ka) * n.y() * n.z(), kb * n.x() * n.z(), -ka * n.x() * n.y()};
}

double HarmonicTorque::potential(const Vec3& n) const {
  return 0.5 * inertia *
         (omega_alpha * omega_alpha * n.y() * n.y() + omega_beta * omega_beta * n.z() * n.z());
}

namespace {

struct Derivative {
  Vec3 n_dot;
  Vec3 omega_dot;
};

Derivative rhs(const Vec3& n, const Vec3& omega, double spin, double inertia,
               const TorqueModel& torque) {
  return {omega.cross(n), (torque(n) - spin * omega.cross(n)) / inertia};
}

}  // namespace

std::vector<RigidBodyState> rigid_body_integrate(double inertia, const TorqueModel& torque,
                                                 const RigidBodyState& initial, double dt,
                                                 double duration, std::size_t stride) {
  if (!(inertia > 0.0)) throw DomainError("moment of inertia must be > 0");
  if (!(dt > 0.0) || !(duration >= 0.0) || !std::isfinite(dt))
    throw ConfigError("dt must be > 0 and duration >= 0");
  if (stride == 0) throw ConfigError("output stride must be >= 1");
  if (std::abs(initial.n_hat.norm() - 1.0) > 1e-9)
    throw DomainError("initial easy axis must be a unit vector");

  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<RigidBodyState> out;
  out.reserve(steps / stride + 1);
  RigidBodyState s = initial;
  out.push_back(s);
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto k1 = rhs(s.n_hat, s.omega, s.spin, inertia, torque);
    const auto k2 = rhs(s.n_hat + 0.5 * dt * k1.n_dot, s.omega + 0.5 * dt * k1.omega_dot, s.spin,
                        inertia, torque);
    const auto k3 = rhs(s.n_hat + 0.5 * dt * k2.n_dot, s.omega + 0.5 * dt * k2.omega_dot, s.spin,
                        inertia, torque);
    const auto k4 =
        rhs(s.n_hat + dt * k3.n_dot, s.omega + dt * k3.omega_dot, s.spin, inertia, torque);
    Vec3 n = s.n_hat + dt / 6.0 * (k1.n_dot + 2.0 * k2.n_dot + 2.0 * k3.n_dot + k4.n_dot);
    s.omega += dt / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
    const double norm = n.norm();
    if (!std::isfinite(norm) || !s.omega.allFinite() || std::abs(norm - 1.0) > 1e-3) {
      std::ostringstream msg;
      msg << "rigid-body step " << k << " (t = " << s.t + dt << " s) lost normalization: |n| = "
          << norm << "; reduce dt (" << dt << " s)";
      throw IntegrationError(msg.str());
    }
    s.n_hat = n / norm;
    s.t = initial.t + static_cast<double>(k) * dt;
    if (k % stride == 0) out.push_back(s);
  }
  return out;
}

std::vector<RigidBodyState> rigid_body_integrate(const MagnetSpec& magnet,
                                                 const TorqueModel& torque,
                                                 const RigidBodyState& initial, double dt,
                                                 double duration, std::size_t stride) {
  return rigid_body_integrate(magnet.inertia(), torque, initial, dt, duration, stride);
}

Vec3 total_angular_momentum(const RigidBodyState& s, double inertia) {
  return inertia * s.omega + s.spin * s.n_hat;
}

double kinetic_energy(const RigidBodyState& s, double inertia) {
  return 0.5 * inertia * s.omega.squaredNorm();
}

RigidBodyState from_libration(const LibrationState& l, double spin, double gamma_dot) {
  const double ca = std::cos(l.alpha), sa = std::sin(l.alpha);
  const double cb = std::cos(l.beta), sb = std::sin(l.beta);
  const Vec3 n(cb * ca, cb * sa, sb);
  const Vec3 dn_da(-cb * sa, cb * ca, 0.0);
  const Vec3 dn_db(-sb * ca, -sb * sa, cb);
  const Vec3 n_dot = l.alpha_dot * dn_da + l.beta_dot * dn_db;
  RigidBodyState s;
  s.n_hat = n;
  s.omega = n.cross(n_dot) + gamma_dot * n;
  s.spin = spin;
  s.t = l.t;
  return s;
}

LibrationState to_libration(const RigidBodyState& s) {
  const Vec3& n = s.n_hat;
  const Vec3 n_dot = s.omega.cross(n);
  const double rho2 = n.x() * n.x() + n.y() * n.y();
  LibrationState l;
  l.alpha = std::atan2(n.y(), n.x());
  l.beta = std::asin(std::clamp(n.z(), -1.0, 1.0));
  l.alpha_dot = (n.x() * n_dot.y() - n.y() * n_dot.x()) / rho2;
  l.beta_dot = n_dot.z() / std::sqrt(rho2);
  l.t = s.t;
  return l;
}

}  // namespace gyrolev::dynamics
