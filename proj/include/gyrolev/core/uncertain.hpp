#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace gyrolev {

/// A value with a one-standard-deviation uncertainty in the same units.
class Uncertain {
 public:
  constexpr Uncertain() = default;
  Uncertain(double value, double sigma = 0.0);

  static Uncertain relative(double value, double rel_sigma);

  double value() const noexcept { return value_; }
  double sigma() const noexcept { return sigma_; }
  double relative_sigma() const;

  Uncertain scaled(double factor) const;

 private:
  double value_ = 0.0;
  double sigma_ = 0.0;
};

// Independent-input first-order propagation.
Uncertain operator+(const Uncertain& a, const Uncertain& b);
Uncertain operator-(const Uncertain& a, const Uncertain& b);
Uncertain operator*(const Uncertain& a, const Uncertain& b);
Uncertain operator/(const Uncertain& a, const Uncertain& b);

std::ostream& operator<<(std::ostream& os, const Uncertain& u);

using ScalarModel = std::function<double(std::span<const double>)>;

/// Linearized propagation through `f` with central-difference partials,
/// step max(|x|, 1) * 1e-6. Throws DomainError when f is not finite at the
/// input values.
Uncertain uncertain_combine(const ScalarModel& f, std::span<const Uncertain> inputs);

/// Monte Carlo propagation with independent Gaussian inputs. Reports the
/// model at the central values and the sample standard deviation.
Uncertain monte_carlo_combine(const ScalarModel& f, std::span<const Uncertain> inputs,
                              std::size_t samples = 10000, std::uint64_t seed = 1);

}  // namespace gyrolev
