#pragma once

#include <span>

namespace gyrolev::app {

/// Published per-particle results, one row per measurement configuration.
struct ReferenceRow {
  int row;
  double radius_um, radius_sigma_um;
  double magnetization_kA_per_m, magnetization_sigma_kA_per_m;
  double f_I_hz, f_I_sigma_hz;
  double g, g_sigma;
};

std::span<const ReferenceRow> reference_rows();
const ReferenceRow& reference_row(int row);

inline constexpr double kReferenceDensity = 7430.0;  // kg/m^3
inline constexpr double kReferenceTrapRadius = 2.5e-3;  // m
inline constexpr double kReferenceFAlphaHz = 100.0;
inline constexpr double kReferenceTemperature = 4.18;  // K

}  // namespace gyrolev::app
