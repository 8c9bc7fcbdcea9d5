#include "gyrolev/analysis/correlation.hpp"

#include <stdexcept>

#include "gyrolev/analysis/fft.hpp"

namespace gyrolev::analysis {
namespace {

constexpr std::size_t kDirectWorkLimit = std::size_t{1} << 18;

std::vector<double> direct(std::span<const double> vi, std::span<const double> vj, std::size_t max_lag) {
  const std::size_t n = vi.size();
  std::vector<double> out(2 * max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t m = 0; m + k < n; ++m) {
      pos += vi[m + k] * vj[m];
      neg += vi[m] * vj[m + k];
    }
    out[max_lag + k] = pos;
    out[max_lag - k] = neg;
  }
  return out;
}

}  // namespace

CorrelationSeries correlate(std::span<const double> vi, std::span<const double> vj, double dt,
                            std::size_t max_lag, CorrelationMethod method) {
  if (vi.size() != vj.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (vi.empty() || max_lag >= vi.size())
    throw std::invalid_argument("max_lag must be below the trace length");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

  if (method == CorrelationMethod::Auto)
    method = vi.size() * (max_lag + 1) > kDirectWorkLimit ? CorrelationMethod::Fft
                                                          : CorrelationMethod::Direct;
  CorrelationSeries s;
  s.dt = dt;
  s.record_length = vi.size();
  s.max_lag = max_lag;
  s.values = method == CorrelationMethod::Fft ? cross_correlate_fft(vi, vj, max_lag)
                                              : direct(vi, vj, max_lag);
  return s;
}

CorrelationSeries correlate(std::span<const double> vi, std::span<const double> vj, double dt) {
  if (vi.empty()) throw std::invalid_argument("empty correlation input");
  return correlate(vi, vj, dt, vi.size() - 1);
}

}  // namespace gyrolev::analysis
