#include "gyrolev/signal/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::signal {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, const std::string& field, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("field '" + field + "': cannot parse number '" + std::string(text) + "'", line);
  if (!std::isfinite(value)) throw ParseError("field '" + field + "': non-finite value", line);
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, const std::string& field, std::size_t line) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("field '" + field + "': expected a non-negative integer", line);
  return value;
}

}  // namespace

void write_trace(const std::filesystem::path& path, const TimeTraceSet& traces) {
  traces.validate();
  if (traces.meta.label.find('\n') != std::string::npos)
    throw DomainError("trace label must be a single line");

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << "version = " << kTraceFormatVersion << '\n'
        << "dt = " << format_double(traces.dt) << '\n'
        << "n_samples = " << traces.size() << '\n'
        << "f_alpha = " << format_double(traces.meta.f_alpha_hz) << '\n'
        << "f_beta = " << format_double(traces.meta.f_beta_hz) << '\n'
        << "mode_excited = " << dynamics::to_string(traces.meta.mode_excited) << '\n'
        << "seed = " << traces.meta.seed << '\n'
        << "label = " << traces.meta.label << '\n'
        << '\n';
    std::string row;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      row = format_double(static_cast<double>(i) * traces.dt);
      row += ", ";
      row += format_double(traces.v1[i]);
      row += ", ";
      row += format_double(traces.v2[i]);
      row += '\n';
      out << row;
    }
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

TimeTraceSet read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::map<std::string, std::pair<std::string, std::size_t>> header;
  std::string line;
  std::size_t line_no = 0;
  bool blank_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) {
      blank_seen = true;
      break;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("header line without '='", line_no);
    std::string key(trim(text.substr(0, eq)));
    std::string value(trim(text.substr(eq + 1)));
    if (!header.emplace(key, std::make_pair(value, line_no)).second)
      throw ParseError("duplicate header key '" + key + "'", line_no);
  }
  if (!blank_seen) throw ParseError("header not terminated by a blank line", line_no);

  static const char* kKeys[] = {"version", "dt",           "n_samples", "f_alpha",
                                "f_beta",  "mode_excited", "seed",      "label"};
  for (const char* key : kKeys) {
    if (!header.count(key)) throw ParseError(std::string("missing header field '") + key + "'");
  }
  for (const auto& [key, entry] : header) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ParseError("unknown header field '" + key + "'", entry.second);
  }
  auto field = [&](const char* key) -> const std::pair<std::string, std::size_t>& {
    return header.at(key);
  };

  const auto version = parse_unsigned(field("version").first, "version", field("version").second);
  if (version != kTraceFormatVersion)
    throw ParseError("unsupported trace format version " + std::to_string(version),
                     field("version").second);

  TimeTraceSet traces;
  traces.dt = parse_double(field("dt").first, "dt", field("dt").second);
  if (!(traces.dt > 0.0)) throw ParseError("field 'dt': must be > 0", field("dt").second);
  const auto n = parse_unsigned(field("n_samples").first, "n_samples", field("n_samples").second);
  traces.meta.f_alpha_hz = parse_double(field("f_alpha").first, "f_alpha", field("f_alpha").second);
  traces.meta.f_beta_hz = parse_double(field("f_beta").first, "f_beta", field("f_beta").second);
  try {
    traces.meta.mode_excited = dynamics::mode_kind_from_string(field("mode_excited").first);
  } catch (const DomainError& e) {
    throw ParseError(std::string("field 'mode_excited': ") + e.what(), field("mode_excited").second);
  }
  traces.meta.seed = parse_unsigned(field("seed").first, "seed", field("seed").second);
  traces.meta.label = field("label").first;

  traces.v1.reserve(n);
  traces.v2.reserve(n);
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError("expected three comma-separated columns 't, v1, v2'", line_no);
    const double t = parse_double(text.substr(0, c1), "t", line_no);
    const double expected_t = static_cast<double>(traces.v1.size()) * traces.dt;
    if (std::abs(t - expected_t) > 1e-9 * std::max(1.0, std::abs(expected_t)))
      throw ParseError("field 't': time does not match row index * dt", line_no);
    traces.v1.push_back(parse_double(text.substr(c1 + 1, c2 - c1 - 1), "v1", line_no));
    traces.v2.push_back(parse_double(text.substr(c2 + 1), "v2", line_no));
  }
  if (traces.v1.size() != n) {
    throw ParseError("field 'n_samples': header says " + std::to_string(n) + " rows, file has " +
                         std::to_string(traces.v1.size()),
                     field("n_samples").second);
  }
  if (n < 2) throw ParseError("field 'n_samples': at least two samples required", field("n_samples").second);
  return traces;
}

}  // namespace gyrolev::signal
