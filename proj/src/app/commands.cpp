#include "gyrolev/app/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gyrolev/analysis/correlation.hpp"
#include "gyrolev/analysis/inference.hpp"
#include "gyrolev/app/report.hpp"
#include "gyrolev/core/errors.hpp"
#include "gyrolev/core/parallel.hpp"
#include "gyrolev/dynamics/eigenmodes.hpp"
#include "gyrolev/magnetostatics/cavity.hpp"
#include "gyrolev/signal/trace_io.hpp"

namespace gyrolev::app {
namespace fs = std::filesystem;

namespace {

constexpr const char* kTraceExtension = ".trace";

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string fixed(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pm(const Uncertain& u, int digits) { return fixed(u.value(), digits) + " +- " + fixed(u.sigma(), digits); }

std::vector<double> phases(const std::vector<analysis::TraceAnalysis>& v) {
  std::vector<double> out;
  for (const auto& t : v) out.push_back(t.cross.phi);
  return out;
}

std::vector<double> r_values(const std::vector<analysis::TraceAnalysis>& v) {
  std::vector<double> out;
  for (const auto& t : v) out.push_back(t.r);
  return out;
}

void add_pipeline(Report& report, const analysis::PipelineResult& res) {
  const auto& inf = res.inference;
  report.add("r_alpha", inf.r_alpha, inf.n_alpha, "1");
  report.add("r_beta", inf.r_beta, inf.n_beta, "1");
  report.add("r_product", inf.product, std::min(inf.n_alpha, inf.n_beta), "1");
  report.add("omega_I", inf.omega_I, std::min(inf.n_alpha, inf.n_beta), "rad/s");
  report.add("f_I", inf.f_I, std::min(inf.n_alpha, inf.n_beta), "Hz");
  report.add("f_alpha_fit", res.omega_alpha.mean.scaled(1.0 / kTwoPi), inf.n_alpha, "Hz");
  report.add("f_beta_fit", res.omega_beta.mean.scaled(1.0 / kTwoPi), inf.n_beta, "Hz");
  report.add("phi_alpha", res.phi_alpha.mean, inf.n_alpha, "rad");
  report.add("phi_beta", res.phi_beta.mean, inf.n_beta, "rad");
  report.add_text("failed_fits.alpha", std::to_string(res.failed_alpha));
  report.add_text("failed_fits.beta", std::to_string(res.failed_beta));
}

void write_distributions(const fs::path& dir, const std::string& prefix, const analysis::PipelineResult& res) {
  write_atomic(dir / (prefix + "phi_alpha_hist.csv"), histogram_csv(analysis::histogram(phases(res.alpha), 20)));
  write_atomic(dir / (prefix + "phi_beta_hist.csv"), histogram_csv(analysis::histogram(phases(res.beta), 20)));
  write_atomic(dir / (prefix + "r_alpha_hist.csv"), histogram_csv(analysis::histogram(r_values(res.alpha), 20)));
  write_atomic(dir / (prefix + "r_beta_hist.csv"), histogram_csv(analysis::histogram(r_values(res.beta), 20)));
}

// Auto- and cross-correlation of one repetition with its fits, every 5th lag.
void write_curves(const fs::path& dir, const std::string& prefix, const signal::TimeTraceSet& trace,
                  const analysis::TraceAnalysis& fit) {
  const bool alpha = trace.meta.mode_excited == dynamics::ModeKind::QuasiAlpha;
  const auto& main = alpha ? trace.v1 : trace.v2;
  const auto& other = alpha ? trace.v2 : trace.v1;
  const std::string tag = alpha ? "alpha" : "beta";
  write_atomic(dir / (prefix + "corr_auto_" + tag + ".csv"),
               correlation_csv(analysis::correlate(main, main, trace.dt), fit.main_auto, 5));
  write_atomic(dir / (prefix + "corr_cross_" + tag + ".csv"),
               correlation_csv(analysis::correlate(main, other, trace.dt), fit.cross, 5));
}

}  // namespace

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const AnalysisError& e) {
    err << "analysis failed: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const ConvergenceError& e) {
    err << "analysis failed: " << e.what() << " (last residual " << e.residual() << ")\n";
    return kExitAnalysis;
  } catch (const IntegrationError& e) {
    err << "analysis failed: " << e.what() << '\n';
    return kExitAnalysis;
  }
}

int cmd_simulate(const fs::path& config_path, const GlobalOptions& global, std::ostream& out) {
  RunConfig config = load_config(config_path);
  if (global.seed) config.acquisition.seed = *global.seed;
  const SimulationPlan plan = plan_simulation(config);
  ensure_directory(global.out);
  const auto traces = simulate_all(plan, global.jobs);

  nlohmann::ordered_json manifest;
  manifest["format_version"] = signal::kTraceFormatVersion;
  manifest["config"] = nlohmann::ordered_json::parse(config_to_json(config));
  auto& derived = manifest["derived"];
  derived["f_alpha_hz"] = plan.f_alpha_hz;
  derived["f_beta_hz"] = plan.f_beta_hz;
  derived["f_beta_trap_hz"] = plan.f_beta_trap_hz;
  derived["f_z_hz"] = plan.f_z_hz;
  derived["f_I_hz"] = angular_to_hz(plan.params.omega_I);
  derived["z0_um"] = plan.z0 * 1e6;
  derived["inertia_kg_m2"] = plan.params.inertia;
  derived["samples"] = plan.samples;
  derived["integration_substeps"] = plan.substeps;
  auto& files = manifest["traces"];
  files = nlohmann::ordered_json::array();
  for (const auto& t : traces) {
    const std::string name = t.meta.label + kTraceExtension;
    signal::write_trace(global.out / name, t);
    files.push_back({{"file", name}, {"mode", dynamics::to_string(t.meta.mode_excited)}, {"seed", t.meta.seed}});
  }
  write_atomic(global.out / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << traces.size() << " traces (" << plan.repetitions_alpha << " quasi-alpha, "
      << plan.repetitions_beta << " quasi-beta) to " << global.out.string() << '\n'
      << "f_alpha = " << fixed(plan.f_alpha_hz, 3) << " Hz, f_beta = " << fixed(plan.f_beta_hz, 3)
      << " Hz, f_z = " << fixed(plan.f_z_hz, 3) << " Hz, f_I = " << fixed(angular_to_hz(plan.params.omega_I), 4)
      << " Hz\n";
  return kExitOk;
}

int cmd_infer_magnet(const InferMagnetOptions& o, const GlobalOptions& global, std::ostream& out) {
  if (!(o.f_z_hz > 0.0) || !(o.f_beta_hz > 0.0) || !(o.f_alpha_hz > 0.0))
    throw DomainError("frequencies must be positive");
  if (o.f_alpha_hz >= o.f_beta_hz) throw DomainError("f_alpha must be below f_beta");
  for (double s : {o.sigma_f_rel, o.sigma_trap_rel, o.sigma_density_rel})
    if (!(s >= 0.0)) throw DomainError("relative uncertainties must be non-negative");

  const double f_beta_c = magnetostatics::beta_correction(o.f_beta_hz, o.f_alpha_hz);
  magnetostatics::InferencePriors priors;
  priors.trap_radius = Uncertain::relative(o.trap_radius_mm * 1e-3, o.sigma_trap_rel);
  priors.density = Uncertain::relative(o.density_kg_per_m3, o.sigma_density_rel);
  priors.g0 = o.g0_m_per_s2;
  priors.samples = o.samples;
  if (global.seed) priors.seed = *global.seed;
  const auto est = magnetostatics::infer_magnet(Uncertain::relative(hz_to_angular(o.f_z_hz), o.sigma_f_rel),
                                                Uncertain::relative(hz_to_angular(f_beta_c), o.sigma_f_rel),
                                                priors);

  // Derived quantities over the same joint draws.
  auto derived = [](double radius, double magnetization, double density) {
    const MagnetSpec m(radius, magnetization, density);
    return std::array<double, 3>{m.mass(), m.moment(), m.inertia()};
  };
  const auto central = derived(est.radius.value(), est.magnetization.value(), o.density_kg_per_m3);
  std::array<double, 3> sigma{0.0, 0.0, 0.0};
  if (est.samples.size() >= 2) {
    std::array<double, 3> mean{0, 0, 0}, m2{0, 0, 0};
    std::size_t n = 0;
    for (const auto& s : est.samples) {
      const auto d = derived(s.radius, s.magnetization, s.density);
      ++n;
      for (int k = 0; k < 3; ++k) {
        const double delta = d[k] - mean[k];
        mean[k] += delta / static_cast<double>(n);
        m2[k] += delta * (d[k] - mean[k]);
      }
    }
    for (int k = 0; k < 3; ++k) sigma[k] = std::sqrt(m2[k] / static_cast<double>(n - 1));
  }

  Report r;
  r.add("f_beta_corrected", Uncertain::relative(f_beta_c, o.sigma_f_rel), 1, "Hz");
  r.add("radius", est.radius.scaled(1e6), est.samples.size(), "um");
  r.add("magnetization", est.magnetization.scaled(1e-3), est.samples.size(), "kA/m");
  r.add("mass", Uncertain(central[0], sigma[0]), est.samples.size(), "kg");
  r.add("moment", Uncertain(central[1], sigma[1]), est.samples.size(), "A m^2");
  r.add("inertia", Uncertain(central[2], sigma[2]), est.samples.size(), "kg m^2");
  r.add("solve_relative_residual", est.relative_residual, "1");
  out << r.str();
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& o, const GlobalOptions& global, std::ostream& out) {
  if (!fs::is_directory(o.trace_dir)) throw IoError("trace directory not found: " + o.trace_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.trace_dir))
    if (entry.is_regular_file() && entry.path().extension() == kTraceExtension) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw AnalysisError("no " + std::string(kTraceExtension) + " files in " + o.trace_dir.string());

  std::vector<signal::TimeTraceSet> traces(files.size());
  parallel_for(files.size(), global.jobs, [&](std::size_t i) { traces[i] = signal::read_trace(files[i]); });

  auto header_frequency = [&](bool alpha) -> double {
    for (const auto& t : traces)
      if ((t.meta.mode_excited == dynamics::ModeKind::QuasiAlpha) == alpha)
        return alpha ? t.meta.f_alpha_hz : t.meta.f_beta_hz;
    throw AnalysisError(std::string("no ") + (alpha ? "quasi-alpha" : "quasi-beta") + " traces");
  };
  const double f_alpha = o.f_alpha_hz ? *o.f_alpha_hz : header_frequency(true);
  const double f_beta = o.f_beta_hz ? *o.f_beta_hz : header_frequency(false);
  if (!(f_alpha > 0.0) || !(f_beta > 0.0)) throw DomainError("mode frequencies must be positive");

  analysis::AnalysisOptions ao;
  ao.jobs = global.jobs;
  ao.window_periods = o.window_periods;
  auto res = analysis::analyze_repetitions(traces, hz_to_angular(f_alpha), hz_to_angular(f_beta), ao);

  Report report;
  add_pipeline(report, res);
  if (o.radius_um && o.magnetization_kA_per_m) {
    const auto g = analysis::g_factor_from_magnet(Uncertain(*o.magnetization_kA_per_m * 1e3),
                                                  Uncertain(*o.radius_um * 1e-6),
                                                  Uncertain(o.density_kg_per_m3), res.inference.omega_I);
    res.inference.g = g;
    report.add("g", g, std::min(res.inference.n_alpha, res.inference.n_beta), "1");
  }
  ensure_directory(global.out);
  write_atomic(global.out / "analysis_report.txt", report.str());
  write_distributions(global.out, "", res);
  for (auto mode : {dynamics::ModeKind::QuasiAlpha, dynamics::ModeKind::QuasiBeta}) {
    const double w = hz_to_angular(mode == dynamics::ModeKind::QuasiAlpha ? f_alpha : f_beta);
    for (const auto& t : traces) {
      if (t.meta.mode_excited != mode) continue;
      try {
        write_curves(global.out, "", t, analysis::analyze_trace(t, w, ao));
        break;
      } catch (const ConvergenceError&) {
      } catch (const AnalysisError&) {
      }
    }
  }
  out << report.str();
  for (const auto& d : res.diagnostics) out << "# fit failure " << d << '\n';
  return kExitOk;
}

int cmd_eigenmodes(const EigenmodeOptions& o, std::ostream& out) {
  dynamics::LibrationParams p;
  p.omega_alpha = hz_to_angular(o.f_alpha_hz);
  p.omega_beta = hz_to_angular(o.f_beta_hz);
  p.omega_I = hz_to_angular(o.f_I_hz);
  p.gamma_dot = o.gamma_dot_rad_per_s;
  p.eps_alpha = o.eps_alpha;
  p.eps_beta = o.eps_beta;
  p.validate();
  const auto modes = dynamics::eigenmodes(p);

  out << "mode         f_hz              ellipticity       phase_rad      g_quasi           residual\n";
  for (const auto& m : modes) {
    std::string g_quasi = "n/a";
    try {
      g_quasi = format_number(dynamics::quasi_mode(p, m.which, 1.0).ellipticity);
    } catch (const DomainError&) {
    }
    const double scale = std::pow(std::max(p.omega_alpha, p.omega_beta), 4);
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-17.10g %-17.10g %-14.6f %-17s %.3g\n", dynamics::to_string(m.which),
                  angular_to_hz(m.omega), m.ellipticity(), m.phase(), g_quasi.c_str(),
                  std::abs(dynamics::characteristic_residual(p, m.omega)) / scale);
    out << line;
  }
  return kExitOk;
}

int cmd_reproduce_table(const ReproduceOptions& options, const GlobalOptions& global, std::ostream& out) {
  ensure_directory(global.out);
  Report report;
  bool all_pass = true;
  out << "row | R (um) sim / published        | M (kA/m) sim / published    | f_I (Hz) sim / published      "
         "| g sim / published           | pass\n";
  for (int index : options.rows) {
    const ReferenceRow& row = reference_row(index);
    const RowOutcome r = reproduce_row(row, options);
    all_pass = all_pass && r.pass();
    const auto& inf = r.analysis.inference;
    const std::string key = "row" + std::to_string(index);
    const std::size_t n = std::min(inf.n_alpha, inf.n_beta);
    report.add(key + ".f_z", r.plan.f_z_hz, "Hz");
    report.add(key + ".f_beta_trap", r.plan.f_beta_trap_hz, "Hz");
    report.add(key + ".f_beta", r.plan.f_beta_hz, "Hz");
    report.add(key + ".z0", r.plan.z0 * 1e6, "um");
    report.add(key + ".f_I_injected", row.f_I_hz, "Hz");
    report.add(key + ".radius", r.magnet.radius.scaled(1e6), r.magnet.samples.size(), "um");
    report.add(key + ".magnetization", r.magnet.magnetization.scaled(1e-3), r.magnet.samples.size(), "kA/m");
    report.add(key + ".r_alpha", inf.r_alpha, inf.n_alpha, "1");
    report.add(key + ".r_beta", inf.r_beta, inf.n_beta, "1");
    report.add(key + ".f_I", inf.f_I, n, "Hz");
    report.add(key + ".g", r.g, n, "1");
    report.add_text(key + ".f_I_recovered", r.f_I_recovered ? "pass" : "fail");
    report.add_text(key + ".f_I_vs_published", r.f_I_matches ? "pass" : "fail");
    report.add_text(key + ".radius_vs_published", r.radius_matches ? "pass" : "fail");
    report.add_text(key + ".magnetization_vs_published", r.magnetization_matches ? "pass" : "fail");
    report.add_text(key + ".g_vs_published", r.g_matches ? "pass" : "fail");
    write_distributions(global.out, key + "_", r.analysis);

    char line[512];
    std::snprintf(line, sizeof line, "%3d | %-12s / %-13s | %-12s / %-13s | %-13s / %-13s | %-11s / %-13s | %s\n",
                  index, pm(r.magnet.radius.scaled(1e6), 1).c_str(),
                  pm(Uncertain(row.radius_um, row.radius_sigma_um), 1).c_str(),
                  pm(r.magnet.magnetization.scaled(1e-3), 0).c_str(),
                  pm(Uncertain(row.magnetization_kA_per_m, row.magnetization_sigma_kA_per_m), 0).c_str(),
                  pm(inf.f_I, 3).c_str(), pm(Uncertain(row.f_I_hz, row.f_I_sigma_hz), 2).c_str(),
                  pm(r.g, 2).c_str(), pm(Uncertain(row.g, row.g_sigma), 2).c_str(), r.pass() ? "pass" : "FAIL");
    out << line << std::flush;
  }
  write_atomic(global.out / "reproduce_table.txt", report.str());
  return all_pass ? kExitOk : kExitAnalysis;
}

}  // namespace gyrolev::app
