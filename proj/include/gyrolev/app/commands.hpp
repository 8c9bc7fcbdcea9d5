#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gyrolev/app/config.hpp"
#include "gyrolev/app/reproduce.hpp"

namespace gyrolev::app {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitAnalysis = 4 };

/// Runs `body`, mapping exceptions onto exit codes with a one-line message:
/// config and domain errors -> 2, I/O and parse errors -> 3, analysis,
/// convergence and integration errors -> 4.
int run_guarded(const std::function<int()>& body, std::ostream& err);

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::filesystem::path out = "gyrolev_out";
};

int cmd_simulate(const std::filesystem::path& config_path, const GlobalOptions& global, std::ostream& out);

struct InferMagnetOptions {
  double f_z_hz = 0.0;
  double f_beta_hz = 0.0;   // as measured, before the residual-field correction
  double f_alpha_hz = 0.0;
  double sigma_f_rel = 0.01;
  double trap_radius_mm = 2.5;
  double sigma_trap_rel = 0.10;
  double density_kg_per_m3 = 7430.0;
  double sigma_density_rel = 0.05;
  double g0_m_per_s2 = PhysicalConstants::standard_gravity;
  std::size_t samples = 10000;
};

int cmd_infer_magnet(const InferMagnetOptions& options, const GlobalOptions& global, std::ostream& out);

struct AnalyzeOptions {
  std::filesystem::path trace_dir;
  std::optional<double> f_alpha_hz;  // taken from the trace headers when empty
  std::optional<double> f_beta_hz;
  std::optional<double> radius_um;   // g is reported when R and M are given
  std::optional<double> magnetization_kA_per_m;
  double density_kg_per_m3 = 7430.0;
  std::optional<double> window_periods;
};

int cmd_analyze(const AnalyzeOptions& options, const GlobalOptions& global, std::ostream& out);

struct EigenmodeOptions {
  double f_alpha_hz = 100.0;
  double f_beta_hz = 400.0;
  double f_I_hz = 0.0;
  double gamma_dot_rad_per_s = 0.0;
  double eps_alpha = 0.0;
  double eps_beta = 0.0;
};

int cmd_eigenmodes(const EigenmodeOptions& options, std::ostream& out);

int cmd_reproduce_table(const ReproduceOptions& options, const GlobalOptions& global, std::ostream& out);

}  // namespace gyrolev::app
