#include "gyrolev/dynamics/libration.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"

namespace gyrolev::dynamics {

void LibrationParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(omega_alpha > 0.0) || !(omega_beta > 0.0) || !finite(omega_alpha) || !finite(omega_beta))
    throw DomainError("libration frequencies must be positive and finite");
  if (omega_alpha == omega_beta) throw DomainError("degenerate libration modes (omega_alpha == omega_beta)");
  if (!finite(omega_I) || !finite(gamma_dot)) throw DomainError("coupling must be finite");
  if (!(std::abs(eps_alpha) < 1.0) || !(std::abs(eps_beta) < 1.0))
    throw DomainError("inertia cross terms must satisfy |eps| < 1");
  if (!(damping_alpha >= 0.0) || !(damping_beta >= 0.0))
    throw DomainError("damping rates must be non-negative");
  if (!(temperature >= 0.0)) throw DomainError("temperature must be non-negative");
  if (temperature > 0.0 && !(inertia > 0.0))
    throw DomainError("thermal runs need the moment of inertia");
}

LibrationDerivative linearized_rhs(const LibrationState& s, const LibrationParams& p) {
  const double det = 1.0 - p.eps_alpha * p.eps_beta;
  if (std::abs(det) < 1e-12) throw DomainError("degenerate inertia: 1 - eps_alpha eps_beta ~ 0");
  const double w = p.coupling();
  const double f_alpha = -p.omega_alpha * p.omega_alpha * s.alpha - w * s.beta_dot -
                         2.0 * p.damping_alpha * s.alpha_dot;
  const double f_beta = -p.omega_beta * p.omega_beta * s.beta + w * s.alpha_dot -
                        2.0 * p.damping_beta * s.beta_dot;
  return {s.alpha_dot, s.beta_dot, (f_alpha + p.eps_alpha * f_beta) / det,
          (f_beta + p.eps_beta * f_alpha) / det};
}

double libration_energy(const LibrationState& s, const LibrationParams& p) {
  return 0.5 * (s.alpha_dot * s.alpha_dot + p.omega_alpha * p.omega_alpha * s.alpha * s.alpha) +
         0.5 * (s.beta_dot * s.beta_dot + p.omega_beta * p.omega_beta * s.beta * s.beta);
}

namespace {

// Exact one-step propagator of the noise-free linear system, state order
// (alpha, beta, alpha', beta'). The columns are the rhs of the unit states.
Eigen::Matrix4d step_propagator(const LibrationParams& p, double dt) {
  Eigen::Matrix4d a;
  for (int j = 0; j < 4; ++j) {
    LibrationState e;
    (j == 0 ? e.alpha : j == 1 ? e.beta : j == 2 ? e.alpha_dot : e.beta_dot) = 1.0;
    const auto d = linearized_rhs(e, p);
    a.col(j) << d.alpha, d.beta, d.alpha_dot, d.beta_dot;
  }
  return (a * dt).exp();
}

}  // namespace

std::vector<LibrationState> linearized_integrate(const LibrationParams& params,
                                                 const LibrationState& initial, double dt,
                                                 double duration,
                                                 std::optional<std::uint64_t> seed,
                                                 std::size_t stride) {
  params.validate();
  if (!(dt > 0.0) || !(duration >= 0.0)) throw ConfigError("dt must be > 0 and duration >= 0");
  if (stride == 0) throw ConfigError("output stride must be >= 1");
  const double f_max = angular_to_hz(std::max(params.omega_alpha, params.omega_beta));
  const double dt_max = 1.0 / (50.0 * f_max);
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " s exceeds 1/(50 f_max) = " << dt_max << " s";
    throw ConfigError(msg.str());
  }

  const bool noisy = params.thermal() && (params.damping_alpha > 0.0 || params.damping_beta > 0.0);
  if (noisy && !seed) throw ConfigError("thermal integration requires a seed");
  std::mt19937_64 rng(seed.value_or(0));
  std::normal_distribution<double> normal;
  const double kt_over_i =
      params.thermal() ? PhysicalConstants::boltzmann * params.temperature / params.inertia : 0.0;
  const double kick_alpha = std::sqrt(4.0 * params.damping_alpha * kt_over_i * dt);
  const double kick_beta = std::sqrt(4.0 * params.damping_beta * kt_over_i * dt);

  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<LibrationState> out;
  out.reserve(steps / stride + 1);
  LibrationState s = initial;
  const double t0 = initial.t;
  out.push_back(s);
  const Eigen::Matrix4d prop = step_propagator(params, dt);
  Eigen::Vector4d x(s.alpha, s.beta, s.alpha_dot, s.beta_dot);
  for (std::size_t n = 1; n <= steps; ++n) {
    x = prop * x;
    s.alpha = x(0);
    s.beta = x(1);
    s.alpha_dot = x(2);
    s.beta_dot = x(3);
    if (noisy) {
      s.alpha_dot += kick_alpha * normal(rng);
      s.beta_dot += kick_beta * normal(rng);
      x(2) = s.alpha_dot;
      x(3) = s.beta_dot;
    }
    s.t = t0 + static_cast<double>(n) * dt;
    if (n % stride == 0) out.push_back(s);
  }
  return out;
}

LibrationState draw_thermal_state(const LibrationParams& params, std::uint64_t seed) {
  params.validate();
  if (!params.thermal()) return {};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double kt_over_i = PhysicalConstants::boltzmann * params.temperature / params.inertia;
  const double v = std::sqrt(kt_over_i);
  LibrationState s;
  s.alpha = v / params.omega_alpha * normal(rng);
  s.beta = v / params.omega_beta * normal(rng);
  s.alpha_dot = v * normal(rng);
  s.beta_dot = v * normal(rng);
  return s;
}

const char* to_string(ModeKind kind) {
  return kind == ModeKind::QuasiAlpha ? "quasi-alpha" : "quasi-beta";
}

ModeKind mode_kind_from_string(const std::string& text) {
  if (text == "quasi-alpha" || text == "alpha") return ModeKind::QuasiAlpha;
  if (text == "quasi-beta" || text == "beta") return ModeKind::QuasiBeta;
  throw DomainError("unknown mode '" + text + "' (expected quasi-alpha or quasi-beta)");
}

LibrationState QuasiMode::state_at(double t) const {
  const double s = std::sin(frequency * t), c = std::cos(frequency * t);
  const double a = primary_amplitude, g = ellipticity, w = frequency;
  if (which == ModeKind::QuasiAlpha) return {a * s, g * a * c, a * w * c, -g * a * w * s, t};
  return {g * a * c, a * s, -g * a * w * s, a * w * c, t};
}

QuasiMode quasi_mode(const LibrationParams& params, ModeKind which, double amplitude) {
  params.validate();
  const double wa = params.omega_alpha, wb = params.omega_beta;
  const double split = wb * wb - wa * wa;
  const double w_mode = which == ModeKind::QuasiAlpha ? wa : wb;
  const double g = w_mode * params.coupling() / split;
  if (!(std::abs(params.coupling()) * std::max(wa, wb) < std::abs(split)))
    throw DomainError("coupling too strong for the perturbative quasi-mode form");
  return {which, w_mode, amplitude, g, std::numbers::pi / 2.0};
}

double einstein_de_haas_frequency(double spin, double inertia) {
  if (!(inertia > 0.0)) throw DomainError("moment of inertia must be > 0");
  if (!(spin > 0.0)) throw DomainError("intrinsic angular momentum must be > 0");
  return spin / inertia;
}

double einstein_de_haas_frequency(double spin, double inertia_yy, double inertia_zz) {
  if (!(inertia_yy > 0.0) || !(inertia_zz > 0.0)) throw DomainError("moments of inertia must be > 0");
  if (!(spin > 0.0)) throw DomainError("intrinsic angular momentum must be > 0");
  return spin / std::sqrt(inertia_yy * inertia_zz);
}

double thermal_gamma_dot_rms(double temperature, double inertia) {
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  if (!(inertia > 0.0)) throw DomainError("moment of inertia must be > 0");
  return std::sqrt(PhysicalConstants::boltzmann * temperature / inertia);
}

}  // namespace gyrolev::dynamics
