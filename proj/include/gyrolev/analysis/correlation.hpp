#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gyrolev::analysis {

/// Discrete correlation C_ij(k dt) for k in [-max_lag, max_lag].
struct CorrelationSeries {
  double dt = 0.0;
  std::size_t record_length = 0;  // samples per channel
  std::size_t max_lag = 0;
  std::vector<double> values;     // values[k + max_lag] = C(k)

  std::size_t size() const noexcept { return values.size(); }
  double lag(std::size_t index) const noexcept {
    return (static_cast<double>(index) - static_cast<double>(max_lag)) * dt;
  }
  double at(std::ptrdiff_t k) const { return values.at(static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(max_lag))); }
};

enum class CorrelationMethod { Auto, Direct, Fft };

/// C_ij(k dt) = sum_n vi[n + k] vj[n] over the N - |k| overlapping samples,
/// unnormalized. `max_lag` defaults to the full domain N - 1. Direct
/// summation is exact in the sense of plain floating-point sums; Auto
/// switches to FFT for large N * max_lag.
CorrelationSeries correlate(std::span<const double> vi, std::span<const double> vj, double dt,
                            std::size_t max_lag, CorrelationMethod method = CorrelationMethod::Auto);

CorrelationSeries correlate(std::span<const double> vi, std::span<const double> vj, double dt);

}  // namespace gyrolev::analysis
