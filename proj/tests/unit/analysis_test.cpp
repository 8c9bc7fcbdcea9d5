#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gyrolev/analysis/correlation.hpp"
#include "gyrolev/analysis/fit.hpp"
#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"
#include "gyrolev/core/magnet.hpp"
#include "gyrolev/dynamics/libration.hpp"
#include "gyrolev/signal/traces.hpp"

using namespace gyrolev;
using namespace gyrolev::analysis;

namespace {

std::vector<double> noise(std::size_t n, double rms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, rms);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

// Correlation series sampled exactly from the envelope-cosine model.
CorrelationSeries model_series(double a0, double a1, double omega, double phi, double dt,
                               std::size_t n) {
  CorrelationSeries s;
  s.dt = dt;
  s.record_length = n;
  s.max_lag = n - 1;
  for (std::size_t i = 0; i < 2 * n - 1; ++i) {
    const double tau = (static_cast<double>(i) - static_cast<double>(n - 1)) * dt;
    s.values.push_back(a0 * (1.0 - a1 * std::abs(tau)) * std::cos(omega * tau + phi));
  }
  return s;
}

struct Channels {
  std::vector<double> v1, v2;
};

// Noise-free detector signals for a single quasi-mode.
Channels quasi_mode_channels(const dynamics::QuasiMode& q, const signal::MixingMatrix& m,
                             double dt, std::size_t n) {
  Channels c;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = q.state_at(static_cast<double>(i) * dt);
    c.v1.push_back(m.a * s.alpha + m.b * s.beta);
    c.v2.push_back(m.c * s.alpha + m.d * s.beta);
  }
  return c;
}

// r-factor measured through correlate + fit for one quasi-mode.
double measured_r(const Channels& c, dynamics::ModeKind mode, double omega, double dt) {
  const bool alpha = mode == dynamics::ModeKind::QuasiAlpha;
  const auto& main = alpha ? c.v1 : c.v2;
  const auto& other = alpha ? c.v2 : c.v1;
  const auto auto_fit = fit_correlation(correlate(main, main, dt), omega);
  const auto cross_fit = fit_correlation(correlate(main, other, dt), auto_fit.omega);
  return r_factor(phase_components(cross_fit), phase_components(auto_fit));
}

// Time-averaged correlation algebra for v_i = a_i sin + b_i cos:
// c_ij = (a_i a_j + b_i b_j) / 2, s_ij = (a_i b_j - b_i a_j) / 2.
double oracle_r(double a_main, double b_main, double a_other, double b_other) {
  return (a_main * b_other - b_main * a_other) / (a_main * a_main + b_main * b_main);
}

dynamics::LibrationParams params(double fa, double fb, double fi) {
  dynamics::LibrationParams p;
  p.omega_alpha = hz_to_angular(fa);
  p.omega_beta = hz_to_angular(fb);
  p.omega_I = hz_to_angular(fi);
  return p;
}

}  // namespace

TEST_CASE("zero-lag autocorrelation is the sum of squares") {
  const auto v = noise(1000, 1.0, 1);
  double sum = 0.0;
  for (double x : v) sum += x * x;
  const auto c = correlate(v, v, 1e-3, 10, CorrelationMethod::Direct);
  CHECK(c.at(0) == sum);
  CHECK(c.size() == 21);
  CHECK(c.lag(0) == rel_approx(-0.01));
  CHECK(correlate(v, v, 1e-3).max_lag == 999);
}

TEST_CASE("cross-correlations are mirror images") {
  const auto a = noise(500, 1.0, 2), b = noise(500, 2.0, 3);
  const auto c12 = correlate(a, b, 1e-3, 499, CorrelationMethod::Direct);
  const auto c21 = correlate(b, a, 1e-3, 499, CorrelationMethod::Direct);
  for (std::ptrdiff_t k = -499; k <= 499; ++k) CHECK(c12.at(k) == c21.at(-k));
}

TEST_CASE("FFT and direct correlations agree") {
  const auto a = noise(3001, 1.0, 4), b = noise(3001, 0.5, 5);
  for (std::size_t lag : {std::size_t{0}, std::size_t{17}, std::size_t{3000}}) {
    const auto d = correlate(a, b, 1e-3, lag, CorrelationMethod::Direct);
    const auto f = correlate(a, b, 1e-3, lag, CorrelationMethod::Fft);
    const double scale = std::sqrt(correlate(a, a, 1e-3, 0).at(0) * correlate(b, b, 1e-3, 0).at(0));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d.values[i] - f.values[i]) < 1e-12 * scale);
  }
}

TEST_CASE("correlation argument errors") {
  const std::vector<double> a(10, 1.0), b(9, 1.0);
  CHECK_THROWS_AS(correlate(a, b, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(correlate(a, a, 1e-3, 10), std::invalid_argument);
  CHECK_THROWS_AS(correlate(a, a, 0.0, 3), std::invalid_argument);
}

TEST_CASE("sinusoid autocorrelation follows the triangular-envelope cosine") {
  const double amp = 0.7, w = hz_to_angular(100.0), dt = 4e-5;
  const std::size_t n = 12500;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::sin(w * static_cast<double>(i) * dt);
  const auto c = correlate(v, v, dt);
  const double scale = 0.5 * amp * amp * static_cast<double>(n);
  double worst = 0.0;
  for (std::ptrdiff_t k = -static_cast<std::ptrdiff_t>(n - 1); k < static_cast<std::ptrdiff_t>(n); ++k) {
    const double expect = 0.5 * amp * amp * static_cast<double>(n - static_cast<std::size_t>(std::abs(k))) *
                          std::cos(w * static_cast<double>(k) * dt);
    worst = std::max(worst, std::abs(c.at(k) - expect));
  }
  CHECK(worst / scale < 0.01);
}

TEST_CASE("fit recovers exact model parameters") {
  const double w = hz_to_angular(464.4);
  const auto s = model_series(1.0, 2.0, w, 0.1, 4e-5, 12500);
  const auto f = fit_correlation(s, 1.1 * w);
  CHECK(f.a0 == rel_approx(1.0).epsilon(1e-8));
  CHECK(f.a1 == rel_approx(2.0).epsilon(1e-8));
  CHECK(f.omega == rel_approx(w).epsilon(1e-8));
  CHECK(f.phi == rel_approx(0.1).epsilon(1e-8));
  CHECK(f.residual_rms < 1e-10);
  CHECK(f.envelope_valid);
  CHECK_FALSE(f.low_signal);
  CHECK(f.evaluate(0.0) == rel_approx(std::cos(0.1)).epsilon(1e-8));
}

TEST_CASE("fit normalizes the sign of A0 into phi") {
  const double w = hz_to_angular(100.0);
  const auto f = fit_correlation(model_series(-2.0, 1.0, w, 0.3, 1e-4, 5000), w);
  CHECK(f.a0 == rel_approx(2.0).epsilon(1e-8));
  CHECK(f.phi == rel_approx(0.3 - M_PI).epsilon(1e-8));
}

TEST_CASE("in-phase input gives an out-of-phase part consistent with zero") {
  const double w = hz_to_angular(100.0);
  auto s = model_series(1.0, 1.0, w, 0.0, 1e-4, 5000);
  const auto e = noise(s.size(), 0.02, 6);
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] += e[i];
  const auto pc = phase_components(fit_correlation(s, w));
  CHECK(pc.sigma_s > 0.0);
  CHECK(std::abs(pc.s) < 3.0 * pc.sigma_s);
  CHECK(pc.c == rel_approx(1.0).epsilon(0.01));
}

TEST_CASE("fit errors and flags") {
  const double w = hz_to_angular(100.0);
  auto s = model_series(1.0, 1.0, w, 0.0, 1e-4, 5000);
  CHECK_THROWS_AS(fit_correlation(s, -1.0), std::invalid_argument);
  FitOptions tiny;
  tiny.window = 2e-4;
  CHECK_THROWS_AS(fit_correlation(s, w, tiny), std::invalid_argument);

  auto noisy = s;
  const auto e = noise(s.size(), 0.3, 7);
  for (std::size_t i = 0; i < s.size(); ++i) noisy.values[i] += e[i];
  FitOptions once;
  once.max_iterations = 1;
  CHECK_THROWS_AS(fit_correlation(noisy, 1.15 * w, once), ConvergenceError);

  auto faint = model_series(1e-3, 1.0, w, 0.0, 1e-4, 5000);
  const auto big = noise(faint.size(), 1.0, 8);
  for (std::size_t i = 0; i < faint.size(); ++i) faint.values[i] += big[i];
  try {
    CHECK(fit_correlation(faint, w).low_signal);
  } catch (const AnalysisError&) {
    // Equally acceptable: no oscillation found at all.
  }
}

TEST_CASE("windowed fits cover whole periods") {
  const double w = hz_to_angular(100.0);
  CHECK(periods_window(w, 5.0) == rel_approx(0.05));
  FitOptions opt;
  opt.window = periods_window(w, 5.0);
  const auto f = fit_correlation(model_series(1.0, 1.0, w, 0.2, 1e-4, 5000), w, opt);
  CHECK(f.points == 1001);
  CHECK(f.phi == rel_approx(0.2).epsilon(1e-8));
}

TEST_CASE("phase components") {
  CorrelationFit f;
  f.a0 = 2.0;
  f.phi = 0.0;
  auto pc = phase_components(f);
  CHECK(pc.c == 2.0);
  CHECK(pc.s == 0.0);
  f.phi = -M_PI / 2;
  pc = phase_components(f);
  CHECK(std::abs(pc.c) < 1e-15);
  CHECK(pc.s == rel_approx(2.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 100; ++i) {
    f.phi = u(rng);
    pc = phase_components(f);
    CHECK(pc.c * pc.c + pc.s * pc.s == rel_approx(4.0).epsilon(1e-14));
  }
  // sigma_s at phi = 0 is A0 sigma_phi.
  f.phi = 0.0;
  f.covariance(3, 3) = 1e-4;
  f.covariance(0, 0) = 1e-6;
  pc = phase_components(f);
  CHECK(pc.sigma_s == rel_approx(2.0 * 1e-2));
  CHECK(pc.sigma_c == rel_approx(1e-3));
}

TEST_CASE("r-factor definition") {
  CHECK(r_factor({0.1, 0.0, 0, 0}, {2.0, 0.0, 0, 0}) == 0.0);
  CHECK(r_factor({0.1, 0.5, 0, 0}, {2.0, 0.0, 0, 0}) == 0.25);
  CHECK_THROWS_AS(r_factor({0.1, 0.5, 0, 0}, {0.0, 0.0, 0, 0}), AnalysisError);
  CHECK(r_product(Uncertain(2.0, 0.1), Uncertain(3.0, 0.3)).value() == 6.0);
}

TEST_CASE("measured r-factors match the correlation algebra") {
  const auto p = params(100, 400, 0.62);
  const signal::MixingMatrix m{1.0, 0.03, 0.03, 1.0};
  const double dt = 4e-5;
  const std::size_t n = 12500;

  const auto qa = dynamics::quasi_mode(p, dynamics::ModeKind::QuasiAlpha, 1e-2);
  const double ga = qa.ellipticity;
  // alpha = sin, beta = g cos: V1 = A sin + B g cos, V2 = C sin + D g cos.
  const double ra = oracle_r(m.a, m.b * ga, m.c, m.d * ga);
  CHECK(ra == rel_approx(ga * (m.a * m.d - m.b * m.c) / (m.a * m.a + m.b * m.b * ga * ga)));
  CHECK(measured_r(quasi_mode_channels(qa, m, dt, n), qa.which, qa.frequency, dt) ==
        rel_approx(ra).epsilon(0.01));

  const auto qb = dynamics::quasi_mode(p, dynamics::ModeKind::QuasiBeta, 1e-2);
  const double gb = qb.ellipticity;
  // beta = sin, alpha = g cos: V2 = D sin + C g cos, V1 = B sin + A g cos.
  const double rb = oracle_r(m.d, m.c * gb, m.b, m.a * gb);
  CHECK(measured_r(quasi_mode_channels(qb, m, dt, n), qb.which, qb.frequency, dt) ==
        rel_approx(rb).epsilon(0.01));

  // Perfect selectivity: r equals the ellipticity.
  CHECK(oracle_r(1.0, 0.0, 0.0, ga) == ga);
}

TEST_CASE("r-factors are independent of the overall gain") {
  const auto p = params(100, 400, 0.62);
  const auto q = dynamics::quasi_mode(p, dynamics::ModeKind::QuasiAlpha, 1e-2);
  const double dt = 4e-5;
  const double r1 = measured_r(quasi_mode_channels(q, {1.0, 0.03, 0.03, 1.0}, dt, 12500), q.which, q.frequency, dt);
  const double r10 = measured_r(quasi_mode_channels(q, {10.0, 0.3, 0.3, 10.0}, dt, 12500), q.which, q.frequency, dt);
  CHECK(r10 == rel_approx(r1).epsilon(1e-9));
}

TEST_CASE("omega_I inverts the ellipticity product exactly") {
  const auto p = params(100, 453.5, 0.62);
  const double ga = dynamics::quasi_mode(p, dynamics::ModeKind::QuasiAlpha, 1).ellipticity;
  const double gb = dynamics::quasi_mode(p, dynamics::ModeKind::QuasiBeta, 1).ellipticity;
  const auto w = omega_I_from_r(Uncertain(ga, 0.0), Uncertain(gb, 0.0), p.omega_alpha, p.omega_beta);
  CHECK(angular_to_hz(w.value()) == rel_approx(0.62).epsilon(1e-10));
  CHECK(omega_I_from_r(Uncertain(0.0), Uncertain(0.0), p.omega_alpha, p.omega_beta).value() == 0.0);
  // Product consistent with zero is clamped; significantly negative throws.
  CHECK(omega_I_from_r(Uncertain(-1e-4, 1e-4), Uncertain(1e-3, 1e-4), p.omega_alpha, p.omega_beta).value() == 0.0);
  CHECK_THROWS_AS(omega_I_from_r(Uncertain(-1e-4, 1e-6), Uncertain(1e-3, 1e-6), p.omega_alpha, p.omega_beta),
                  AnalysisError);
  CHECK_THROWS_AS(omega_I_from_r(Uncertain(ga), Uncertain(gb), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(omega_I_from_r(Uncertain(ga), Uncertain(gb), -1.0, 2.0), DomainError);
}

TEST_CASE("omega_I uncertainty reduces to first-order propagation when resolved") {
  const Uncertain ra(2e-4, 1e-6), rb(1e-3, 5e-6);
  const double wa = 600.0, wb = 3000.0;
  const auto w = omega_I_from_r(ra, rb, wa, wb);
  const double k = (wb * wb - wa * wa) / std::sqrt(wa * wb);
  const double rel = 0.5 * std::hypot(ra.relative_sigma(), rb.relative_sigma());
  CHECK(w.value() == rel_approx(k * std::sqrt(2e-7)));
  CHECK(w.sigma() == rel_approx(w.value() * rel).epsilon(1e-3));
}

TEST_CASE("g-factor from the table magnets") {
  // Row 2 and row 4 of the published table.
  const auto g2 = g_factor_from_magnet(Uncertain(675e3), Uncertain(23.6e-6), Uncertain(7430.0),
                                       Uncertain(hz_to_angular(0.62)));
  CHECK(std::abs(g2.value() - 1.19) < 0.02);
  const auto g4 = g_factor_from_magnet(Uncertain(581e3), Uncertain(18.8e-6), Uncertain(7430.0),
                                       Uncertain(hz_to_angular(0.86)));
  CHECK(std::abs(g4.value() - 1.16) < 0.02);

  CHECK(g_factor(Uncertain(2e-8), Uncertain(1e-34)).value() ==
        rel_approx(2.0 * g_factor(Uncertain(1e-8), Uncertain(1e-34)).value()));
  CHECK(g_factor(Uncertain(PhysicalConstants::bohr_magneton), Uncertain(PhysicalConstants::hbar)).value() ==
        rel_approx(1.0));
  CHECK_THROWS_AS(g_factor(Uncertain(0.0), Uncertain(1e-34)), DomainError);
  CHECK_THROWS_AS(g_factor(Uncertain(1e-8), Uncertain(-1e-34)), DomainError);
  CHECK_THROWS_AS(g_factor_from_magnet(Uncertain(675e3), Uncertain(23.6e-6), Uncertain(7430.0), Uncertain(0.0)),
                  DomainError);
}

TEST_CASE("Monte Carlo g matches the linear form for small uncertainties") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nr(23.6e-6, 0.02e-6), nm(675e3, 2e3);
  std::vector<magnetostatics::MagnetSample> samples;
  for (int i = 0; i < 20000; ++i) samples.push_back({nr(rng), nm(rng), 7430.0});
  const Uncertain m(675e3, 2e3), r(23.6e-6, 0.02e-6), w(hz_to_angular(0.62), 0.002);
  const auto mc = g_factor_monte_carlo(samples, m, r, 7430.0, w, 11);
  const auto lin = g_factor_from_magnet(m, r, Uncertain(7430.0), w);
  CHECK(mc.value() == rel_approx(lin.value()).epsilon(1e-12));
  CHECK(mc.sigma() == rel_approx(lin.sigma()).epsilon(0.05));
  const auto fallback = g_factor_monte_carlo({}, m, r, 7430.0, w, 11);
  CHECK(fallback.sigma() == rel_approx(lin.sigma()).epsilon(1e-9));
}

TEST_CASE("reference g from the ionic composition") {
  CHECK(g_eff_reference(IonComposition::nd2fe14b()) == rel_approx(1.28).epsilon(5e-3));
  CHECK(g_eff_reference(IonComposition::pr2fe14b()) == rel_approx(1.36).epsilon(5e-3));
  CHECK(g_eff_reference(IonComposition({{"X", 1.7, 2.5, 3.0}})) == rel_approx(1.7).epsilon(1e-15));
}

TEST_CASE("repetition statistics") {
  const std::vector<double> ones{1, 1, 1};
  auto s = aggregate_repetitions(ones);
  CHECK(s.mean.value() == 1.0);
  CHECK(s.mean.sigma() == 0.0);
  const std::vector<double> two{0, 2};
  s = aggregate_repetitions(two);
  CHECK(s.mean.value() == 1.0);
  CHECK(s.mean.sigma() == rel_approx(1.0));
  const auto many = noise(128, 3e-5, 12);
  s = aggregate_repetitions(many);
  CHECK(s.values == many);
  CHECK(s.mean.sigma() == rel_approx(s.stddev / std::sqrt(128.0)).epsilon(1e-14));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(aggregate_repetitions(one), AnalysisError);
}

TEST_CASE("histogram") {
  const std::vector<double> v{0.0, 0.1, 0.5, 0.9, 1.0};
  const auto h = histogram(v, 2);
  CHECK(h.edges == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(h.counts == std::vector<std::size_t>{2, 3});
  const std::vector<double> flat{2.0, 2.0};
  CHECK(histogram(flat, 4).counts == std::vector<std::size_t>{0, 0, 2, 0});
  CHECK_THROWS_AS(histogram(v, 0), std::invalid_argument);
  CHECK_THROWS_AS(histogram(std::vector<double>{}, 3), std::invalid_argument);
}

TEST_CASE("inference significance") {
  InferenceResult r;
  r.product = Uncertain(6.0, 2.0);
  CHECK(r.product_significance() == 3.0);
  r.product = Uncertain(0.0, 0.0);
  CHECK(r.product_significance() == 0.0);
}
