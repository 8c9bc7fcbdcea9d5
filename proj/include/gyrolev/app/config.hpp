#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gyrolev/core/magnet.hpp"
#include "gyrolev/signal/traces.hpp"

namespace gyrolev::app {

struct MagnetConfig {
  double radius_um = 23.6;
  double magnetization_kA_per_m = 675.0;
  double density_kg_per_m3 = 7430.0;
};

struct TrapConfig {
  double radius_mm = 2.5;
  double g0_m_per_s2 = PhysicalConstants::standard_gravity;
};

struct LibrationConfig {
  double f_alpha_hz = 0.0;              // required
  std::optional<double> f_beta_hz;      // trap model + residual field when empty
  std::optional<double> f_I_hz;         // S / I with the reference g when empty
  double gamma_dot_rad_per_s = 0.0;
  double eps_alpha = 0.0;
  double eps_beta = 0.0;
  double damping_time_s = 20.0;         // amplitude e-folding time
  double temperature_k = 4.18;
};

struct AcquisitionConfig {
  double sample_rate_hz = 25000.0;
  double duration_s = 0.5;
  std::size_t repetitions_alpha = 128;
  std::size_t repetitions_beta = 64;
  double excitation_rad = 1e-2;
  double noise_rms_v = 1e-4;
  std::uint64_t seed = 1;
};

struct RunConfig {
  MagnetConfig magnet;
  TrapConfig trap;
  LibrationConfig libration;
  AcquisitionConfig acquisition;
  signal::MixingMatrix mixing{1.0, 0.03, 0.03, 1.0};

  MagnetSpec magnet_spec() const;
  TrapSpec trap_spec() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// JSON with sections magnet, trap, libration, acquisition, mixing and
/// unit-suffixed keys. Unknown keys and wrong types are ConfigErrors;
/// libration.f_alpha_hz is required.
RunConfig parse_config(std::string_view json_text);

/// Reads and parses a config file; IoError when unreadable.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering (all fields, fixed key order).
std::string config_to_json(const RunConfig& config);

}  // namespace gyrolev::app
