#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gyrolev/analysis/correlation.hpp"
#include "gyrolev/analysis/fit.hpp"
#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/core/uncertain.hpp"

namespace gyrolev::app {

/// Machine-readable "key = value" report. A quantity q expands to q.value,
/// q.sigma, q.n and q.units lines. Numbers use %.10g, so equal inputs give
/// byte-identical text.
class Report {
 public:
  void add(const std::string& key, const Uncertain& q, std::size_t n, const std::string& units);
  void add(const std::string& key, double value, const std::string& units);
  void add_text(const std::string& key, const std::string& text);

  std::string str() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_number(double x);

/// Writes to path + ".tmp" and renames; IoError on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with columns bin_lo, bin_hi, count.
std::string histogram_csv(const analysis::Histogram& h);

/// CSV with columns tau_s, value[, fit]; every `stride`-th lag.
std::string correlation_csv(const analysis::CorrelationSeries& series,
                            const std::optional<analysis::CorrelationFit>& fit, std::size_t stride = 1);

}  // namespace gyrolev::app
