#include "gyrolev/magnetostatics/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gyrolev/core/errors.hpp"
#include "gyrolev/core/magnet.hpp"
#include "gyrolev/magnetostatics/cavity.hpp"

namespace gyrolev::magnetostatics {

namespace {

constexpr int kMaxIterations = 60;
constexpr double kResidualTolerance = 1e-12;

struct Forward {
  double trap_radius;
  double density;
  double g0;

  // log(omega_z), log(omega_beta) at (log R, log M)
  std::array<double, 2> operator()(double log_r, double log_m) const {
    const MagnetSpec magnet(std::exp(log_r), std::exp(log_m), density);
    const ModeFrequencies f = mode_frequencies(TrapSpec(trap_radius, g0), magnet);
    return {std::log(f.omega_z), std::log(f.omega_beta)};
  }
};

InverseSolution newton(const Forward& forward, double log_wz, double log_wb, double log_r,
                       double log_m) {
  auto residual = [&](double lr, double lm) {
    const auto f = forward(lr, lm);
    return std::array<double, 2>{f[0] - log_wz, f[1] - log_wb};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

  auto res = residual(log_r, log_m);
  int iter = 0;
  for (; iter < kMaxIterations && norm(res) > kResidualTolerance; ++iter) {
    constexpr double h = 1e-6;
    const auto fr_p = forward(log_r + h, log_m);
    const auto fr_m = forward(log_r - h, log_m);
    const auto fm_p = forward(log_r, log_m + h);
    const auto fm_m = forward(log_r, log_m - h);
    const double j00 = (fr_p[0] - fr_m[0]) / (2 * h), j01 = (fm_p[0] - fm_m[0]) / (2 * h);
    const double j10 = (fr_p[1] - fr_m[1]) / (2 * h), j11 = (fm_p[1] - fm_m[1]) / (2 * h);
    const double det = j00 * j11 - j01 * j10;
    if (!std::isfinite(det) || det == 0.0)
      throw ConvergenceError("singular Jacobian in (R, M) inversion", norm(res));
    const double d_r = -(j11 * res[0] - j01 * res[1]) / det;
    const double d_m = -(-j10 * res[0] + j00 * res[1]) / det;

    // Damping: halve until the residual decreases.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      try {
        const auto trial = residual(log_r + lambda * d_r, log_m + lambda * d_m);
        if (norm(trial) < norm(res)) {
          log_r += lambda * d_r;
          log_m += lambda * d_m;
          res = trial;
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
        // step left the levitating region; shrink it
      }
    }
    if (!accepted) break;
  }
  const double rel = std::max(std::abs(std::expm1(res[0])), std::abs(std::expm1(res[1])));
  if (!(rel < 1e-9)) throw ConvergenceError("(R, M) inversion did not converge", rel);
  return {std::exp(log_r), std::exp(log_m), rel, iter};
}

}  // namespace

InverseSolution solve_radius_magnetization(double omega_z, double omega_beta, double trap_radius,
                                           double density, double g0) {
  if (!(omega_z > 0.0) || !(omega_beta > 0.0))
    throw DomainError("trap frequencies must be positive");
  const Forward forward{trap_radius, density, g0};
  const auto start = plane::invert(omega_z, omega_beta, density, g0);
  return newton(forward, std::log(omega_z), std::log(omega_beta), std::log(start.radius),
                std::log(start.magnetization));
}

std::array<double, 4> forward_jacobian(double radius, double magnetization, double trap_radius,
                                       double density, double g0, double log_step) {
  const Forward forward{trap_radius, density, g0};
  const double lr = std::log(radius), lm = std::log(magnetization);
  const auto base = forward(lr, lm);
  const double wz = std::exp(base[0]), wb = std::exp(base[1]);
  const auto rp = forward(lr + log_step, lm), rm = forward(lr - log_step, lm);
  const auto mp = forward(lr, lm + log_step), mm = forward(lr, lm - log_step);
  const double inv = 1.0 / (2.0 * log_step);
  return {wz * (rp[0] - rm[0]) * inv, wz * (mp[0] - mm[0]) * inv, wb * (rp[1] - rm[1]) * inv,
          wb * (mp[1] - mm[1]) * inv};
}

MagnetEstimate infer_magnet(const Uncertain& omega_z, const Uncertain& omega_beta_corrected,
                            const InferencePriors& priors) {
  const double wz = omega_z.value(), wb = omega_beta_corrected.value();
  const double a = priors.trap_radius.value(), rho = priors.density.value();
  const InverseSolution central = solve_radius_magnetization(wz, wb, a, rho, priors.g0);

  // Uniqueness: restart from scattered points and compare the roots reached.
  {
    const Forward forward{a, rho, priors.g0};
    std::vector<std::pair<double, double>> roots{{central.radius, central.magnetization}};
    for (double fr : {0.6, 1.6}) {
      for (double fm : {0.6, 1.6}) {
        try {
          const auto alt = newton(forward, std::log(wz), std::log(wb),
                                  std::log(central.radius * fr),
                                  std::log(central.magnetization * fm));
          const bool known = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
            return std::abs(alt.radius / r.first - 1.0) < 1e-6 &&
                   std::abs(alt.magnetization / r.second - 1.0) < 1e-6;
          });
          if (!known) roots.emplace_back(alt.radius, alt.magnetization);
        } catch (const std::exception&) {
          // a start that fails to converge does not indicate a second root
        }
      }
    }
    if (roots.size() > 1) {
      std::ostringstream msg;
      msg << "multiple (R, M) solutions:";
      for (const auto& [r, m] : roots) msg << " (R=" << r << " m, M=" << m << " A/m)";
      throw DomainError(msg.str());
    }
  }

  MagnetEstimate estimate{Uncertain(central.radius), Uncertain(central.magnetization),
                          central.relative_residual, central.iterations, {}};
  const bool noisy = omega_z.sigma() > 0.0 || omega_beta_corrected.sigma() > 0.0 ||
                     priors.trap_radius.sigma() > 0.0 || priors.density.sigma() > 0.0;
  if (!noisy) return estimate;
  if (priors.samples < 2) throw DomainError("Monte Carlo propagation needs at least two samples");

  std::mt19937_64 rng(priors.seed);
  std::normal_distribution<double> normal;
  estimate.samples.reserve(priors.samples);
  for (std::size_t n = 0; n < priors.samples; ++n) {
    const double s_wz = wz + omega_z.sigma() * normal(rng);
    const double s_wb = wb + omega_beta_corrected.sigma() * normal(rng);
    const double s_a = a + priors.trap_radius.sigma() * normal(rng);
    const double s_rho = rho + priors.density.sigma() * normal(rng);
    const Forward forward{s_a, s_rho, priors.g0};
    const auto sol = newton(forward, std::log(s_wz), std::log(s_wb), std::log(central.radius),
                            std::log(central.magnetization));
    estimate.samples.push_back({sol.radius, sol.magnetization, s_rho});
  }

  auto sample_sigma = [&](auto field) {
    double mean = 0.0;
    for (const auto& s : estimate.samples) mean += field(s);
    mean /= static_cast<double>(estimate.samples.size());
    double ss = 0.0;
    for (const auto& s : estimate.samples) ss += (field(s) - mean) * (field(s) - mean);
    return std::sqrt(ss / static_cast<double>(estimate.samples.size() - 1));
  };
  estimate.radius = Uncertain(central.radius, sample_sigma([](const MagnetSample& s) { return s.radius; }));
  estimate.magnetization =
      Uncertain(central.magnetization, sample_sigma([](const MagnetSample& s) { return s.magnetization; }));
  return estimate;
}

}  // namespace gyrolev::magnetostatics
