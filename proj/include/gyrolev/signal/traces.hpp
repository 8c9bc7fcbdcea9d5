#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gyrolev/dynamics/libration.hpp"

namespace gyrolev::signal {

/// Channel gains in V/rad: V1 = A alpha + B beta, V2 = C alpha + D beta.
struct MixingMatrix {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  /// Throws DomainError unless |A| > 0 and |D| > 0.
  void validate() const;
  /// True when |B/A| or |C/D| exceeds 0.1, i.e. poor channel selectivity.
  bool poor_selectivity() const;
};

struct TraceMeta {
  dynamics::ModeKind mode_excited = dynamics::ModeKind::QuasiAlpha;
  double f_alpha_hz = 0.0;
  double f_beta_hz = 0.0;
  std::uint64_t seed = 0;
  std::string label;
};

/// Two simultaneously sampled detector channels.
struct TimeTraceSet {
  double dt = 0.0;  // s
  std::vector<double> v1;
  std::vector<double> v2;
  TraceMeta meta;

  std::size_t size() const noexcept { return v1.size(); }
  double duration() const noexcept { return dt * static_cast<double>(v1.size()); }

  /// Equal lengths >= 2, dt > 0, finite samples.
  void validate() const;
  /// Additionally requires >= min_periods periods of the excited mode.
  void validate_span(double min_periods = 25.0) const;
};

/// Per-sample linear map of a uniformly sampled trajectory onto the channels.
TimeTraceSet mix_channels(std::span<const dynamics::LibrationState> trajectory,
                          const MixingMatrix& mixing);

/// Adds independent white Gaussian noise per channel and sample.
void add_measurement_noise(TimeTraceSet& traces, double rms_channel1, double rms_channel2,
                           std::uint64_t seed);

}  // namespace gyrolev::signal
