#include "gyrolev/dynamics/eigenmodes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::dynamics {

namespace {

using cd = std::complex<double>;

// Coefficients c0..c4 of det(K + lambda (G + D) + lambda^2 M) in the scaled
// variable mu = lambda / scale.
std::array<double, 5> scaled_characteristic(const LibrationParams& p, double scale) {
  const double w = p.coupling() / scale;
  const double a = (p.omega_alpha / scale) * (p.omega_alpha / scale);
  const double b = (p.omega_beta / scale) * (p.omega_beta / scale);
  const double da = 2.0 * p.damping_alpha / scale, db = 2.0 * p.damping_beta / scale;
  return {a * b, da * b + db * a, a + b + da * db + w * w, da + db - (p.eps_alpha - p.eps_beta) * w,
          1.0 - p.eps_alpha * p.eps_beta};
}

cd evaluate(const std::array<double, 5>& c, cd x) {
  return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

cd evaluate_derivative(const std::array<double, 5>& c, cd x) {
  return ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
}

}  // namespace

double characteristic_residual(const LibrationParams& params, double omega) {
  const double w2 = omega * omega;
  const double wi = params.coupling();
  return (params.omega_alpha * params.omega_alpha - w2) * (params.omega_beta * params.omega_beta - w2) -
         wi * wi * w2;
}

std::array<Eigenmode, 2> eigenmodes(const LibrationParams& params) {
  params.validate();
  const double scale = std::max(params.omega_alpha, params.omega_beta);
  const auto c = scaled_characteristic(params, scale);

  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i] / c[4];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
  if (solver.info() != Eigen::Success) throw DomainError("characteristic polynomial solve failed");

  std::vector<cd> roots;
  for (int i = 0; i < 4; ++i) {
    cd x = solver.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      const cd d = evaluate_derivative(c, x);
      if (d == 0.0) break;
      const cd step = evaluate(c, x) / d;
      x -= step;
      if (std::abs(step) <= 1e-17 * std::abs(x)) break;
    }
    if (x.imag() > 0.0) roots.push_back(x * scale);
  }
  if (roots.size() != 2) throw DomainError("libration modes are not both oscillatory");
  std::sort(roots.begin(), roots.end(), [](cd a, cd b) { return a.imag() < b.imag(); });

  const bool alpha_lower = params.omega_alpha < params.omega_beta;
  const cd lam_alpha = alpha_lower ? roots[0] : roots[1];
  const cd lam_beta = alpha_lower ? roots[1] : roots[0];

  const double w = params.coupling();
  const double da = 2.0 * params.damping_alpha, db = 2.0 * params.damping_beta;
  const double a = params.omega_alpha * params.omega_alpha, b = params.omega_beta * params.omega_beta;
  // Q_beta / Q_alpha from the beta row; Q_alpha / Q_beta from the alpha row.
  const cd ratio_alpha = (params.eps_beta * lam_alpha * lam_alpha + w * lam_alpha) /
                         (lam_alpha * lam_alpha + db * lam_alpha + b);
  const cd ratio_beta = (params.eps_alpha * lam_beta * lam_beta - w * lam_beta) /
                        (lam_beta * lam_beta + da * lam_beta + a);

  return {Eigenmode{ModeKind::QuasiAlpha, lam_alpha.imag(), -lam_alpha.real(), ratio_alpha},
          Eigenmode{ModeKind::QuasiBeta, lam_beta.imag(), -lam_beta.real(), ratio_beta}};
}

LibrationState excite_mode(const Eigenmode& mode, double amplitude, double phase) {
  // Re(P exp(i w t)) = amplitude sin(w t + phase)
  const cd primary = amplitude * std::polar(1.0, phase) * cd(0.0, -1.0);
  const cd secondary = mode.secondary_ratio * primary;
  const cd lambda(-mode.decay_rate, mode.omega);
  LibrationState s;
  if (mode.which == ModeKind::QuasiAlpha) {
    s.alpha = primary.real();
    s.beta = secondary.real();
    s.alpha_dot = (lambda * primary).real();
    s.beta_dot = (lambda * secondary).real();
  } else {
    s.beta = primary.real();
    s.alpha = secondary.real();
    s.beta_dot = (lambda * primary).real();
    s.alpha_dot = (lambda * secondary).real();
  }
  return s;
}

}  // namespace gyrolev::dynamics
