#include "gyrolev/signal/traces.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::signal {

void MixingMatrix::validate() const {
  if (!(std::abs(a) > 0.0) || !(std::abs(d) > 0.0))
    throw DomainError("mixing matrix needs non-zero main gains A and D");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    throw DomainError("mixing gains must be finite");
}

bool MixingMatrix::poor_selectivity() const {
  return std::abs(b / a) > 0.1 || std::abs(c / d) > 0.1;
}

void TimeTraceSet::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("sampling interval must be > 0");
  if (v1.size() != v2.size()) throw DomainError("channel lengths differ");
  if (v1.size() < 2) throw DomainError("a trace needs at least two samples");
  for (std::size_t i = 0; i < v1.size(); ++i) {
    if (!std::isfinite(v1[i]) || !std::isfinite(v2[i]))
      throw DomainError("non-finite sample at index " + std::to_string(i));
  }
}

void TimeTraceSet::validate_span(double min_periods) const {
  validate();
  const double f = meta.mode_excited == dynamics::ModeKind::QuasiAlpha ? meta.f_alpha_hz
                                                                       : meta.f_beta_hz;
  if (!(f > 0.0)) throw DomainError("excited-mode frequency missing from trace metadata");
  const double periods = duration() * f;
  if (periods < min_periods) {
    std::ostringstream msg;
    msg << "trace spans " << periods << " periods of the excited mode; at least " << min_periods
        << " required";
    throw DomainError(msg.str());
  }
}

TimeTraceSet mix_channels(std::span<const dynamics::LibrationState> trajectory,
                          const MixingMatrix& mixing) {
  mixing.validate();
  if (trajectory.size() < 2) throw DomainError("trajectory needs at least two samples");
  TimeTraceSet out;
  out.dt = trajectory[1].t - trajectory[0].t;
  out.v1.resize(trajectory.size());
  out.v2.resize(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& s = trajectory[i];
    out.v1[i] = mixing.a * s.alpha + mixing.b * s.beta;
    out.v2[i] = mixing.c * s.alpha + mixing.d * s.beta;
  }
  return out;
}

void add_measurement_noise(TimeTraceSet& traces, double rms_channel1, double rms_channel2,
                           std::uint64_t seed) {
  if (!(rms_channel1 >= 0.0) || !(rms_channel2 >= 0.0))
    throw DomainError("noise rms must be non-negative");
  if (rms_channel1 == 0.0 && rms_channel2 == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < traces.v1.size(); ++i) {
    traces.v1[i] += rms_channel1 * normal(rng);
    traces.v2[i] += rms_channel2 * normal(rng);
  }
}

}  // namespace gyrolev::signal
