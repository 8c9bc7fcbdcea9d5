#pragma once

#include <span>
#include <vector>

namespace gyrolev::analysis {

/// C(k) = sum_n vi[n + k] vj[n] for k in [-max_lag, max_lag] via zero-padded
/// FFTs. Index k + max_lag of the result holds C(k).
std::vector<double> cross_correlate_fft(std::span<const double> vi, std::span<const double> vj,
                                        std::size_t max_lag);

/// Angular frequency of the largest |DFT| value of y (sampled every dt) in
/// [omega_lo, omega_hi], from an 8x zero-padded transform refined by a
/// parabola through the three bins around the peak.
double spectral_peak(std::span<const double> y, double dt, double omega_lo, double omega_hi);

}  // namespace gyrolev::analysis
