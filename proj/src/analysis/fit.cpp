#include "gyrolev/analysis/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gyrolev/analysis/fft.hpp"
#include "gyrolev/core/errors.hpp"

namespace gyrolev::analysis {
namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Data {
  std::vector<double> tau;
  std::vector<double> y;
};

double model(const Vec4& p, double tau) {
  return p[0] * (1.0 - p[1] * std::abs(tau)) * std::cos(p[2] * tau + p[3]);
}

double rss(const Data& d, const Vec4& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double r = d.y[i] - model(p, d.tau[i]);
    sum += r * r;
  }
  return sum;
}

// Accumulates J^T J and J^T r without storing J.
double normal_equations(const Data& d, const Vec4& p, Mat4& jtj, Vec4& jtr) {
  jtj.setZero();
  jtr.setZero();
  double sum = 0.0;
  Vec4 g;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double t = d.tau[i];
    const double env = 1.0 - p[1] * std::abs(t);
    const double th = p[2] * t + p[3];
    const double c = std::cos(th), s = std::sin(th);
    g << env * c, -p[0] * std::abs(t) * c, -p[0] * env * t * s, -p[0] * env * s;
    const double r = d.y[i] - p[0] * env * c;
    sum += r * r;
    jtj.selfadjointView<Eigen::Upper>().rankUpdate(g);
    jtr += g * r;
  }
  jtj = jtj.selfadjointView<Eigen::Upper>();
  return sum;
}

Mat4 scaled_inverse(const Mat4& m) {
  Vec4 scale;
  for (int i = 0; i < 4; ++i) scale[i] = m(i, i) > 0.0 ? 1.0 / std::sqrt(m(i, i)) : 1.0;
  const Mat4 ms = scale.asDiagonal() * m * scale.asDiagonal();
  return scale.asDiagonal() * ms.inverse() * scale.asDiagonal();
}

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * M_PI);
  if (phi <= -M_PI) phi += 2.0 * M_PI;
  return phi;
}

}  // namespace

double CorrelationFit::sigma(int i) const { return std::sqrt(std::max(covariance(i, i), 0.0)); }

double CorrelationFit::evaluate(double tau) const {
  return a0 * (1.0 - a1 * std::abs(tau)) * std::cos(omega * tau + phi);
}

CorrelationFit fit_correlation(const CorrelationSeries& series, double omega_guess,
                               const FitOptions& options) {
  if (!(omega_guess > 0.0)) throw std::invalid_argument("frequency guess must be positive");
  if (series.values.size() < 8 || !(series.dt > 0.0))
    throw std::invalid_argument("correlation series too short");

  Data d;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.lag(i);
    if (options.window && std::abs(t) > *options.window + 0.5 * series.dt) continue;
    d.tau.push_back(t);
    d.y.push_back(series.values[i]);
  }
  if (d.tau.size() < 8) throw std::invalid_argument("fit window holds fewer than 8 points");
  const double tau_max = std::max(std::abs(d.tau.front()), std::abs(d.tau.back()));
  const double record = static_cast<double>(std::max<std::size_t>(series.record_length, 1)) * series.dt;

  Vec4 p;
  p[2] = spectral_peak(d.y, series.dt, 0.8 * omega_guess, 1.2 * omega_guess);
  p[1] = 1.0 / record;
  {
    // y ~ u E cos(w t) + v E sin(w t), with u = A0 cos(phi), v = -A0 sin(phi)
    Eigen::Matrix2d n = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < d.tau.size(); ++i) {
      const double env = 1.0 - p[1] * std::abs(d.tau[i]);
      const Eigen::Vector2d g(env * std::cos(p[2] * d.tau[i]), env * std::sin(p[2] * d.tau[i]));
      n += g * g.transpose();
      b += g * d.y[i];
    }
    const Eigen::Vector2d uv = n.ldlt().solve(b);
    p[0] = std::hypot(uv[0], uv[1]);
    p[3] = std::atan2(-uv[1], uv[0]);
    if (!(p[0] > 0.0)) throw AnalysisError("correlation series carries no oscillation at the guessed frequency");
  }

  Mat4 jtj;
  Vec4 jtr;
  double current = normal_equations(d, p, jtj, jtr);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations && !converged; ++it) {
    bool accepted = false;
    while (!accepted) {
      Mat4 a = jtj;
      for (int i = 0; i < 4; ++i) a(i, i) *= 1.0 + lambda;
      const Vec4 step = a.ldlt().solve(jtr);
      const Vec4 trial = p + step;
      const double trial_rss = rss(d, trial);
      if (std::isfinite(trial_rss) && trial_rss <= current) {
        accepted = true;
        p = trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        const Vec4 floor(std::abs(p[0]), 1.0 / record, std::abs(p[2]), 1.0);
        bool small = true;
        for (int i = 0; i < 4; ++i)
          if (std::abs(step[i]) > 1e-11 * std::max(std::abs(p[i]), floor[i])) small = false;
        current = normal_equations(d, p, jtj, jtr);
        if (small) converged = true;
      } else {
        lambda *= 10.0;
        // No downhill step left at any damping: at the minimum to rounding.
        if (lambda > 1e16) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceError("correlation fit did not converge", std::sqrt(current / static_cast<double>(d.tau.size())));

  CorrelationFit fit;
  if (p[0] < 0.0) {
    p[0] = -p[0];
    p[3] += M_PI;
  }
  fit.a0 = p[0];
  fit.a1 = p[1];
  fit.omega = p[2];
  fit.phi = wrap_phase(p[3]);
  fit.iterations = it;
  fit.points = d.tau.size();
  fit.residual_rms = std::sqrt(current / static_cast<double>(d.tau.size()));
  const double s2 = current / static_cast<double>(d.tau.size() - 4);
  fit.covariance = scaled_inverse(jtj) * s2;
  fit.low_signal = fit.a0 < 3.0 * fit.sigma(0);
  fit.envelope_valid = 1.0 - fit.a1 * tau_max >= 0.0;
  return fit;
}

PhaseComponents phase_components(const CorrelationFit& fit) {
  PhaseComponents pc;
  const double c = std::cos(fit.phi), s = std::sin(fit.phi);
  pc.c = fit.a0 * c;
  pc.s = -fit.a0 * s;
  // Gradients over (A0, phi), indices 0 and 3 of the covariance.
  const double vaa = fit.covariance(0, 0), vpp = fit.covariance(3, 3), vap = fit.covariance(0, 3);
  const double gc0 = c, gc3 = -fit.a0 * s;
  const double gs0 = -s, gs3 = -fit.a0 * c;
  pc.sigma_c = std::sqrt(std::max(gc0 * gc0 * vaa + 2 * gc0 * gc3 * vap + gc3 * gc3 * vpp, 0.0));
  pc.sigma_s = std::sqrt(std::max(gs0 * gs0 * vaa + 2 * gs0 * gs3 * vap + gs3 * gs3 * vpp, 0.0));
  return pc;
}

}  // namespace gyrolev::analysis
