#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gyrolev::dynamics {

/// Parameters of the linearized two-angle libration model. All frequencies
/// are angular (rad/s).
struct LibrationParams {
  double omega_alpha = 0.0;
  double omega_beta = 0.0;
  double omega_I = 0.0;     // Einstein-de Haas frequency S/I
  double gamma_dot = 0.0;   // classical spin rate about the dipole axis
  double eps_alpha = 0.0;   // inertia-tensor cross terms I_yz/I_zz
  double eps_beta = 0.0;    // and I_yz/I_yy
  double damping_alpha = 0.0;  // amplitude decay rates (1/s)
  double damping_beta = 0.0;
  double temperature = 0.0;    // K; 0 disables the Langevin torque
  double inertia = 0.0;        // kg m^2, required when temperature > 0

  /// Gyroscopic coupling entering the equations: omega_I + gamma_dot.
  double coupling() const noexcept { return omega_I + gamma_dot; }
  bool thermal() const noexcept { return temperature > 0.0; }

  /// Throws DomainError on violated invariants.
  void validate() const;
};

struct LibrationState {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_dot = 0.0;
  double beta_dot = 0.0;
  double t = 0.0;
};

struct LibrationDerivative {
  double alpha;
  double beta;
  double alpha_dot;
  double beta_dot;
};

/// Right-hand side of
///   a'' + wa^2 a + (wI + gd) b' - ea b'' + 2 da a' = 0
///   b'' + wb^2 b - (wI + gd) a' - eb a'' + 2 db b' = 0
/// with the acceleration coupling solved as a 2x2 system.
LibrationDerivative linearized_rhs(const LibrationState& state, const LibrationParams& params);

/// Libration energy per unit inertia, 1/2 (a'^2 + wa^2 a^2) + 1/2 (b'^2 + wb^2 b^2).
double libration_energy(const LibrationState& state, const LibrationParams& params);
/// Fixed step with the exact propagator exp(A dt) of the noise-free linear
/// system. With temperature > 0 a Langevin torque per mode is added
/// Fixed-step RK4. With temperature > 0 a Langevin torque per mode is added
/// after each drift step as a Gaussian velocity increment of variance
/// 4 d kB T dt / I (fluctuation-dissipation for damping term 2 d theta').
/// Returns states at t = k * stride * dt for k = 0 .. floor(steps / stride),
/// steps = round(duration / dt). Requires dt <= 1 / (50 max(f_alpha, f_beta)).
std::vector<LibrationState> linearized_integrate(const LibrationParams& params,
                                                 const LibrationState& initial, double dt,
                                                 double duration,
                                                 std::optional<std::uint64_t> seed = std::nullopt,
                                                 std::size_t stride = 1);

/// Equipartition draw: each angle ~ N(0, kB T / (I w^2)), each rate ~ N(0, kB T / I).
LibrationState draw_thermal_state(const LibrationParams& params, std::uint64_t seed);

enum class ModeKind { QuasiAlpha, QuasiBeta };

const char* to_string(ModeKind kind);
ModeKind mode_kind_from_string(const std::string& text);

/// Perturbative elliptical normal mode: the primary angle oscillates as
/// amplitude * sin(w t), the secondary as ellipticity * amplitude * cos(w t).
struct QuasiMode {
  ModeKind which;
  double frequency;          // rad/s
  double primary_amplitude;  // rad
  double ellipticity;        // secondary / primary, w_mode (wI + gd) / (wb^2 - wa^2)
  double secondary_phase;    // +pi/2

  LibrationState state_at(double t) const;
};

QuasiMode quasi_mode(const LibrationParams& params, ModeKind which, double amplitude);

/// omega_I = S / I, or S / sqrt(I_yy I_zz) for an anisotropic pair.
double einstein_de_haas_frequency(double spin, double inertia);
double einstein_de_haas_frequency(double spin, double inertia_yy, double inertia_zz);

/// sqrt(kB T / I): rms of the thermal spin rate about the dipole axis.
double thermal_gamma_dot_rms(double temperature, double inertia);

}  // namespace gyrolev::dynamics
