#include "gyrolev/core/uncertain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "gyrolev/core/errors.hpp"

namespace gyrolev {

Uncertain::Uncertain(double value, double sigma) : value_(value), sigma_(sigma) {
  if (!std::isfinite(value)) throw DomainError("uncertain value must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("uncertainty must be finite and non-negative, got " + std::to_string(sigma));
}

Uncertain Uncertain::relative(double value, double rel_sigma) {
  return Uncertain(value, std::abs(value) * rel_sigma);
}

double Uncertain::relative_sigma() const {
  if (value_ == 0.0) throw DomainError("relative uncertainty of a zero value");
  return sigma_ / std::abs(value_);
}

Uncertain Uncertain::scaled(double factor) const {
  return Uncertain(value_ * factor, sigma_ * std::abs(factor));
}

Uncertain operator+(const Uncertain& a, const Uncertain& b) {
  return Uncertain(a.value() + b.value(), std::hypot(a.sigma(), b.sigma()));
}

Uncertain operator-(const Uncertain& a, const Uncertain& b) {
  return Uncertain(a.value() - b.value(), std::hypot(a.sigma(), b.sigma()));
}

Uncertain operator*(const Uncertain& a, const Uncertain& b) {
  return Uncertain(a.value() * b.value(),
                   std::hypot(a.sigma() * b.value(), b.sigma() * a.value()));
}

Uncertain operator/(const Uncertain& a, const Uncertain& b) {
  if (b.value() == 0.0) throw DomainError("division by an uncertain zero");
  const double q = a.value() / b.value();
  return Uncertain(q, std::hypot(a.sigma() / b.value(), q * b.sigma() / b.value()));
}

std::ostream& operator<<(std::ostream& os, const Uncertain& u) {
  return os << u.value() << " +/- " << u.sigma();
}

Uncertain uncertain_combine(const ScalarModel& f, std::span<const Uncertain> inputs) {
  std::vector<double> x(inputs.size());
  std::transform(inputs.begin(), inputs.end(), x.begin(),
                 [](const Uncertain& u) { return u.value(); });

  const double center = f(x);
  if (!std::isfinite(center)) throw DomainError("model is not finite at the input point");

  double variance = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (inputs[i].sigma() == 0.0) continue;
    const double x0 = x[i];
    const double h = std::max(std::abs(x0), 1.0) * 1e-6;
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    x[i] = x0;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DomainError("model is not finite near input " + std::to_string(i));
    const double partial = (up - down) / (2.0 * h);
    variance += partial * partial * inputs[i].sigma() * inputs[i].sigma();
  }
  return Uncertain(center, std::sqrt(variance));
}

Uncertain monte_carlo_combine(const ScalarModel& f, std::span<const Uncertain> inputs,
                              std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("Monte Carlo propagation needs at least two samples");
  std::vector<double> x(inputs.size());
  std::transform(inputs.begin(), inputs.end(), x.begin(),
                 [](const Uncertain& u) { return u.value(); });
  const double center = f(x);
  if (!std::isfinite(center)) throw DomainError("model is not finite at the input point");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  // Welford accumulation
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = inputs[i].value() + inputs[i].sigma() * normal(rng);
    const double y = f(x);
    if (!std::isfinite(y)) throw DomainError("model is not finite at a sampled point");
    const double delta = y - mean;
    mean += delta / static_cast<double>(n + 1);
    m2 += delta * (y - mean);
  }
  return Uncertain(center, std::sqrt(m2 / static_cast<double>(samples - 1)));
}

}  // namespace gyrolev
