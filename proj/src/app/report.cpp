#include "gyrolev/app/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::app {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void Report::add(const std::string& key, const Uncertain& q, std::size_t n, const std::string& units) {
  entries_.emplace_back(key + ".value", format_number(q.value()));
  entries_.emplace_back(key + ".sigma", format_number(q.sigma()));
  entries_.emplace_back(key + ".n", std::to_string(n));
  entries_.emplace_back(key + ".units", units);
}

void Report::add(const std::string& key, double value, const std::string& units) {
  entries_.emplace_back(key + ".value", format_number(value));
  entries_.emplace_back(key + ".units", units);
}

void Report::add_text(const std::string& key, const std::string& text) { entries_.emplace_back(key, text); }

std::string Report::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string histogram_csv(const analysis::Histogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_number(h.edges[i]) << ',' << format_number(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  return out.str();
}

std::string correlation_csv(const analysis::CorrelationSeries& series,
                            const std::optional<analysis::CorrelationFit>& fit, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::ostringstream out;
  out << (fit ? "tau_s,value,fit\n" : "tau_s,value\n");
  for (std::size_t i = 0; i < series.size(); i += stride) {
    const double tau = series.lag(i);
    out << format_number(tau) << ',' << format_number(series.values[i]);
    if (fit) out << ',' << format_number(fit->evaluate(tau));
    out << '\n';
  }
  return out.str();
}

}  // namespace gyrolev::app
