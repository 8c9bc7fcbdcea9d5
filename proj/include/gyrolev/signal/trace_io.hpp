#pragma once

#include <filesystem>

#include "gyrolev/signal/traces.hpp"

namespace gyrolev::signal {

inline constexpr int kTraceFormatVersion = 1;

/// Text trace file: "key = value" header (version, dt, n_samples, f_alpha,
/// f_beta, mode_excited, seed, label), one blank line, then rows "t, v1, v2"
/// with 17 significant digits. Written to a temporary file and renamed.
void write_trace(const std::filesystem::path& path, const TimeTraceSet& traces);

/// Throws ParseError naming the offending line or field.
TimeTraceSet read_trace(const std::filesystem::path& path);

}  // namespace gyrolev::signal
