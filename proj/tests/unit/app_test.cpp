#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "gyrolev/app/commands.hpp"
#include "gyrolev/app/config.hpp"
#include "gyrolev/app/reference.hpp"
#include "gyrolev/app/report.hpp"
#include "gyrolev/app/reproduce.hpp"
#include "gyrolev/app/simulation.hpp"
#include "gyrolev/core/constants.hpp"
#include "gyrolev/core/errors.hpp"
#include "gyrolev/signal/trace_io.hpp"

using namespace gyrolev;
using namespace gyrolev::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gyrolev_app_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
  return std::stod(kv.at(key));
}

const fs::path kDefaultConfig = fs::path(GYROLEV_SOURCE_DIR) / "configs" / "default.json";

std::string small_config(double f_I_hz, std::size_t reps_alpha, std::size_t reps_beta, double rate,
                         double duration) {
  std::ostringstream s;
  s << R"({"libration": {"f_alpha_hz": 100, "f_I_hz": )" << f_I_hz << R"(},
           "acquisition": {"sample_rate_hz": )" << rate << R"(, "duration_s": )" << duration
    << R"(, "repetitions_alpha": )" << reps_alpha << R"(, "repetitions_beta": )" << reps_beta << "}}";
  return s.str();
}

int guarded(const std::function<int(std::ostream&)>& body, std::string* captured = nullptr) {
  std::ostringstream out, err;
  const int code = run_guarded([&] { return body(out); }, err);
  if (captured) *captured = out.str() + err.str();
  return code;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(GYROLEV_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("default config parses and round-trips") {
  const auto c = load_config(kDefaultConfig);
  CHECK(c.libration.f_alpha_hz == 100.0);
  CHECK(c.libration.f_I_hz.value() == 0.62);
  CHECK(c.magnet.radius_um == 23.6);
  CHECK(c.acquisition.repetitions_alpha == 128);
  CHECK(c.acquisition.repetitions_beta == 64);
  CHECK(c.mixing.b == 0.03);
  const auto text = config_to_json(c);
  CHECK(config_to_json(parse_config(text)) == text);
}

TEST_CASE("config errors name the field") {
  auto message = [](const std::string& json) {
    try {
      parse_config(json);
      return std::string("accepted");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
  };
  CHECK(message(R"({"libration": {"f_alpha_hz": 100, "f_alfa_hz": 3}})").find("f_alfa_hz") != std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": "100"}})").find("f_alpha_hz") != std::string::npos);
  CHECK(message(R"({"libration": {"f_I_hz": 0.6}})").find("f_alpha_hz") != std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": 100}, "optics": {}})").find("optics") != std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": 100}, "acquisition": {"duration_s": -1}})").find("duration_s") !=
        std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": 100}, "acquisition": {"repetitions_beta": 1}})")
            .find("repetitions_beta") != std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": 100}, "mixing": {"a_v_per_rad": 0}})").find("a_v_per_rad") !=
        std::string::npos);
  CHECK(message("{not json").find("JSON") != std::string::npos);
  CHECK(message(R"({"libration": {"f_alpha_hz": 100}})") == "accepted");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("simulation plan for the default magnet") {
  const auto plan = plan_simulation(load_config(kDefaultConfig));
  CHECK(plan.z0 * 1e6 == rel_approx(297.6).epsilon(1e-3));
  CHECK(plan.f_z_hz == rel_approx(56.397).epsilon(1e-3));
  CHECK(plan.f_beta_trap_hz == rel_approx(563.57).epsilon(1e-3));
  CHECK(plan.f_beta_hz == rel_approx(std::hypot(plan.f_beta_trap_hz, 100.0)));
  CHECK(angular_to_hz(plan.params.omega_I) == rel_approx(0.62));
  CHECK(plan.samples == 12500);
  CHECK(plan.substeps == 2);  // 25 kHz against 50 x 572 Hz
  CHECK(plan.sample_dt / static_cast<double>(plan.substeps) <= 1.0 / (50.0 * plan.f_beta_hz));
  CHECK(plan.params.damping_alpha == rel_approx(0.05));
}

TEST_CASE("default spin follows the reference g") {
  auto c = load_config(kDefaultConfig);
  c.libration.f_I_hz.reset();
  const auto plan = plan_simulation(c);
  // S / I with g = 1.28 for the default magnet; 0.62 Hz corresponds to g = 1.19.
  CHECK(angular_to_hz(plan.params.omega_I) == rel_approx(0.62 * 1.19 / 1.28).epsilon(0.02));
}

TEST_CASE("records shorter than 25 alpha periods are rejected") {
  CHECK_THROWS_AS(plan_simulation(parse_config(small_config(0.62, 2, 2, 25000, 0.2))), ConfigError);
  CHECK_NOTHROW(plan_simulation(parse_config(small_config(0.62, 2, 2, 25000, 0.25))));
}

TEST_CASE("repetitions depend only on plan, mode and index") {
  const auto plan = plan_simulation(parse_config(small_config(0.62, 4, 4, 25000, 0.25)));
  const auto a = simulate_repetition(plan, dynamics::ModeKind::QuasiAlpha, 3);
  const auto b = simulate_repetition(plan, dynamics::ModeKind::QuasiAlpha, 3);
  const auto c = simulate_repetition(plan, dynamics::ModeKind::QuasiAlpha, 2);
  CHECK(a.v1 == b.v1);
  CHECK(a.v2 == b.v2);
  CHECK(a.v1 != c.v1);
  CHECK(a.meta.label == "alpha_0003");
  CHECK(a.size() == plan.samples);
  CHECK(a.dt == plan.sample_dt);
  const auto all1 = simulate_all(plan, 1), all3 = simulate_all(plan, 3);
  REQUIRE(all1.size() == 8);
  for (std::size_t i = 0; i < all1.size(); ++i) CHECK(all1[i].v2 == all3[i].v2);
  CHECK(all1[4].meta.mode_excited == dynamics::ModeKind::QuasiBeta);
}

TEST_CASE("simulate writes one file per repetition and a deterministic manifest") {
  TempDir dir;
  spit(dir.path / "c.json", small_config(0.62, 128, 64, 5000, 0.25));
  GlobalOptions g1, g2;
  g1.out = dir.path / "run1";
  g2.out = dir.path / "run2";
  g2.jobs = 2;
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", g1, o); }) == kExitOk);
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", g2, o); }) == kExitOk);
  std::size_t traces = 0;
  for (const auto& e : fs::directory_iterator(g1.out)) traces += e.path().extension() == ".trace";
  CHECK(traces == 192);
  CHECK(slurp(g1.out / "manifest.json") == slurp(g2.out / "manifest.json"));
  CHECK(slurp(g1.out / "beta_0063.trace") == slurp(g2.out / "beta_0063.trace"));

  GlobalOptions g3 = g1;
  g3.out = dir.path / "run3";
  g3.seed = 7;
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", g3, o); }) == kExitOk);
  CHECK(slurp(g1.out / "manifest.json") != slurp(g3.out / "manifest.json"));
}

TEST_CASE("simulate exit codes") {
  TempDir dir;
  spit(dir.path / "bad.json", R"({"libration": {"f_alpha_hz": 100}, "acquisition": {"duration_s": 0.1}})");
  spit(dir.path / "ok.json", small_config(0.62, 2, 2, 5000, 0.25));
  spit(dir.path / "blocker", "x");
  GlobalOptions g;
  g.out = dir.path / "out";
  std::string text;
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "bad.json", g, o); }, &text) == kExitConfig);
  CHECK(text.find("duration_s") != std::string::npos);
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "missing.json", g, o); }) == kExitIo);
  g.out = dir.path / "blocker" / "out";
  CHECK(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "ok.json", g, o); }) == kExitIo);
}

TEST_CASE("infer-magnet round trip from forward frequencies") {
  const auto plan = plan_simulation(load_config(kDefaultConfig));
  InferMagnetOptions o;
  o.f_z_hz = plan.f_z_hz;
  o.f_beta_hz = plan.f_beta_hz;
  o.f_alpha_hz = plan.f_alpha_hz;
  std::string text;
  CHECK(guarded([&](std::ostream& out) { return cmd_infer_magnet(o, {}, out); }, &text) == kExitOk);
  const auto kv = parse_report(text);
  CHECK(num(kv, "radius.value") == rel_approx(23.6).epsilon(0.01));
  CHECK(num(kv, "magnetization.value") == rel_approx(675.0).epsilon(0.03));
  CHECK(num(kv, "radius.sigma") > 0.0);
  CHECK(kv.at("radius.units") == "um");
  CHECK(num(kv, "moment.value") == rel_approx(3.72e-8).epsilon(0.01));

  o.sigma_f_rel = o.sigma_trap_rel = o.sigma_density_rel = 0.0;
  CHECK(guarded([&](std::ostream& out) { return cmd_infer_magnet(o, {}, out); }, &text) == kExitOk);
  const auto exact = parse_report(text);
  CHECK(num(exact, "radius.sigma") == 0.0);
  CHECK(num(exact, "magnetization.sigma") == 0.0);
  CHECK(num(exact, "inertia.sigma") == 0.0);

  o.f_alpha_hz = o.f_beta_hz;
  CHECK(guarded([&](std::ostream& out) { return cmd_infer_magnet(o, {}, out); }) == kExitConfig);
}

TEST_CASE("analyze recovers the injected frequency and is reproducible") {
  TempDir dir;
  spit(dir.path / "c.json", small_config(0.62, 16, 8, 25000, 0.5));
  GlobalOptions sim;
  sim.out = dir.path / "traces";
  REQUIRE(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", sim, o); }) == kExitOk);

  AnalyzeOptions a;
  a.trace_dir = sim.out;
  a.radius_um = 23.6;
  a.magnetization_kA_per_m = 675.0;
  GlobalOptions g1, g2;
  g1.out = dir.path / "a1";
  g2.out = dir.path / "a2";
  g2.jobs = 3;
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g1, o); }) == kExitOk);
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g2, o); }) == kExitOk);
  const auto report = slurp(g1.out / "analysis_report.txt");
  CHECK(report == slurp(g2.out / "analysis_report.txt"));
  const auto kv = parse_report(report);
  CHECK(std::abs(num(kv, "f_I.value") - 0.62) < 3.0 * num(kv, "f_I.sigma"));
  CHECK(kv.at("f_I.n") == "8");
  CHECK(std::abs(num(kv, "g.value") - 1.19) < 3.0 * num(kv, "g.sigma"));
  for (const char* f : {"phi_alpha_hist.csv", "phi_beta_hist.csv", "r_alpha_hist.csv", "r_beta_hist.csv",
                        "corr_auto_alpha.csv", "corr_cross_beta.csv"})
    CHECK(fs::exists(g1.out / f));
  CHECK(slurp(g1.out / "phi_alpha_hist.csv").rfind("bin_lo,bin_hi,count\n", 0) == 0);
}

TEST_CASE("analyze on a spin-free data set finds no coupling") {
  TempDir dir;
  spit(dir.path / "c.json", small_config(0.0, 8, 8, 25000, 0.5));
  GlobalOptions sim;
  sim.out = dir.path / "traces";
  REQUIRE(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", sim, o); }) == kExitOk);
  AnalyzeOptions a;
  a.trace_dir = sim.out;
  GlobalOptions g;
  g.out = dir.path / "a";
  std::string text;
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g, o); }, &text) == kExitOk);
  const auto kv = parse_report(text);
  CHECK(std::abs(num(kv, "r_product.value")) < 3.0 * num(kv, "r_product.sigma"));
}

TEST_CASE("analyze exit codes") {
  TempDir dir;
  spit(dir.path / "c.json", small_config(0.62, 2, 2, 5000, 0.25));
  GlobalOptions sim;
  sim.out = dir.path / "traces";
  REQUIRE(guarded([&](std::ostream& o) { return cmd_simulate(dir.path / "c.json", sim, o); }) == kExitOk);
  for (const auto& e : fs::directory_iterator(sim.out))
    if (e.path().filename().string().rfind("beta_", 0) == 0) fs::remove(e.path());
  AnalyzeOptions a;
  a.trace_dir = sim.out;
  GlobalOptions g;
  g.out = dir.path / "a";
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g, o); }) == kExitAnalysis);
  a.trace_dir = dir.path / "nowhere";
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g, o); }) == kExitIo);
  fs::create_directories(dir.path / "empty");
  a.trace_dir = dir.path / "empty";
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g, o); }) == kExitAnalysis);
  spit(dir.path / "empty" / "broken.trace", "version = 1\n");
  CHECK(guarded([&](std::ostream& o) { return cmd_analyze(a, g, o); }) == kExitIo);
}

TEST_CASE("eigenmodes table") {
  EigenmodeOptions o;
  std::ostringstream out;
  CHECK(cmd_eigenmodes(o, out) == kExitOk);
  CHECK(out.str().find("quasi-alpha  100 ") != std::string::npos);

  o.f_beta_hz = 572.375;
  o.f_I_hz = 0.62;
  std::ostringstream coupled;
  CHECK(cmd_eigenmodes(o, coupled) == kExitOk);
  std::istringstream lines(coupled.str());
  std::string header, mode;
  std::getline(lines, header);
  double f = 0, ell = 0, phase = 0, g = 0, residual = 1;
  lines >> mode >> f >> ell >> phase >> g >> residual;
  CHECK(mode == "quasi-alpha");
  CHECK(ell == rel_approx(g).epsilon(1e-3));
  CHECK(ell > 1e-4);
  CHECK(ell < 1e-3);
  CHECK(residual < 1e-10);

  o.f_beta_hz = o.f_alpha_hz;
  CHECK(guarded([&](std::ostream& s) { return cmd_eigenmodes(o, s); }) == kExitConfig);
}

TEST_CASE("reference rows") {
  CHECK(reference_rows().size() == 4);
  CHECK(reference_row(2).f_I_hz == 0.62);
  CHECK(reference_row(1).g == 1.11);
  CHECK_THROWS_AS(reference_row(5), ConfigError);
  const auto c = reference_config(reference_row(3), {});
  CHECK(c.magnet.radius_um == 19.0);
  CHECK(c.libration.f_I_hz.value() == 0.88);
  CHECK(agrees(Uncertain(1.0, 0.1), Uncertain(1.2, 0.0)));
  CHECK_FALSE(agrees(Uncertain(1.0, 0.1), Uncertain(1.4, 0.0)));
}

TEST_CASE("report formatting") {
  Report r;
  r.add("f_I", Uncertain(0.62, 0.02), 64, "Hz");
  r.add("z0", 297.6, "um");
  r.add_text("status", "pass");
  CHECK(r.str() == "f_I.value = 0.62\nf_I.sigma = 0.02\nf_I.n = 64\nf_I.units = Hz\nz0.value = 297.6\n"
                   "z0.units = um\nstatus = pass\n");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("command-line exit codes") {
  TempDir dir;
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("") == kExitConfig);
  CHECK(run_binary("frobnicate") == kExitConfig);
  CHECK(run_binary("eigenmodes --f-alpha 100 --f-beta 400 --f-I 0.62") == kExitOk);
  CHECK(run_binary("eigenmodes --f-alpha abc") == kExitConfig);
  CHECK(run_binary("analyze " + (dir.path / "nowhere").string()) == kExitIo);
  CHECK(run_binary("infer-magnet --f-z 56 --f-beta 90 --f-alpha 100") == kExitConfig);

  spit(dir.path / "c.json", small_config(0.62, 2, 2, 5000, 0.25));
  const std::string env_out = (dir.path / "from_env").string();
  CHECK(std::system(("GYROLEV_OUT=" + env_out + " " + GYROLEV_BINARY + " simulate " +
                     (dir.path / "c.json").string() + " > /dev/null 2>&1")
                        .c_str()) == 0);
  CHECK(fs::exists(fs::path(env_out) / "manifest.json"));
  const std::string flag_out = (dir.path / "from_flag").string();
  CHECK(std::system(("GYROLEV_OUT=" + env_out + " " + GYROLEV_BINARY + " simulate " +
                     (dir.path / "c.json").string() + " --out " + flag_out + " > /dev/null 2>&1")
                        .c_str()) == 0);
  CHECK(fs::exists(fs::path(flag_out) / "manifest.json"));
}
