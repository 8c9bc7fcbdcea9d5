#include "gyrolev/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::app {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& root, std::string name, std::set<std::string> known)
      : name_(std::move(name)), known_(std::move(known)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ConfigError(name_ + ": expected an object");
    for (const auto& [key, value] : node_->items())
      if (!known_.count(key)) throw ConfigError(name_ + "." + key + ": unknown key");
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  void read(const std::string& key, double& target) const {
    if (!has(key)) return;
    const auto& v = node_->at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    target = v.get<double>();
    if (!std::isfinite(target)) throw ConfigError(path(key) + ": must be finite");
  }

  void read(const std::string& key, std::optional<double>& target) const {
    if (!has(key)) return;
    double x = 0.0;
    read(key, x);
    target = x;
  }

  template <typename Unsigned>
  void read_count(const std::string& key, Unsigned& target) const {
    if (!has(key)) return;
    const auto& v = node_->at(key);
    if (!v.is_number_unsigned()) throw ConfigError(path(key) + ": expected a non-negative integer");
    target = v.get<Unsigned>();
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  std::set<std::string> known_;
  const json* node_ = nullptr;
};

void require_positive(double x, const std::string& field) {
  if (!(x > 0.0)) throw ConfigError(field + ": must be positive");
}

void require_non_negative(double x, const std::string& field) {
  if (!(x >= 0.0)) throw ConfigError(field + ": must be non-negative");
}

}  // namespace

MagnetSpec RunConfig::magnet_spec() const {
  return MagnetSpec(magnet.radius_um * 1e-6, magnet.magnetization_kA_per_m * 1e3, magnet.density_kg_per_m3);
}

TrapSpec RunConfig::trap_spec() const { return TrapSpec(trap.radius_mm * 1e-3, trap.g0_m_per_s2); }

void RunConfig::validate() const {
  require_positive(magnet.radius_um, "magnet.radius_um");
  require_positive(magnet.magnetization_kA_per_m, "magnet.magnetization_kA_per_m");
  require_positive(magnet.density_kg_per_m3, "magnet.density_kg_per_m3");
  require_positive(trap.radius_mm, "trap.radius_mm");
  require_positive(trap.g0_m_per_s2, "trap.g0_m_per_s2");
  if (magnet.radius_um * 1e-3 >= trap.radius_mm) throw ConfigError("magnet.radius_um: magnet does not fit in the trap");

  require_positive(libration.f_alpha_hz, "libration.f_alpha_hz");
  if (libration.f_beta_hz) {
    require_positive(*libration.f_beta_hz, "libration.f_beta_hz");
    if (*libration.f_beta_hz <= libration.f_alpha_hz)
      throw ConfigError("libration.f_beta_hz: must exceed f_alpha_hz");
  }
  if (libration.f_I_hz) require_non_negative(*libration.f_I_hz, "libration.f_I_hz");
  if (!(std::abs(libration.eps_alpha) < 1.0)) throw ConfigError("libration.eps_alpha: |eps| must be below 1");
  if (!(std::abs(libration.eps_beta) < 1.0)) throw ConfigError("libration.eps_beta: |eps| must be below 1");
  require_positive(libration.damping_time_s, "libration.damping_time_s");
  require_non_negative(libration.temperature_k, "libration.temperature_k");

  require_positive(acquisition.sample_rate_hz, "acquisition.sample_rate_hz");
  require_positive(acquisition.duration_s, "acquisition.duration_s");
  if (acquisition.repetitions_alpha < 2) throw ConfigError("acquisition.repetitions_alpha: need at least 2");
  if (acquisition.repetitions_beta < 2) throw ConfigError("acquisition.repetitions_beta: need at least 2");
  require_positive(acquisition.excitation_rad, "acquisition.excitation_rad");
  require_non_negative(acquisition.noise_rms_v, "acquisition.noise_rms_v");
  if (acquisition.duration_s * acquisition.sample_rate_hz < 2.0)
    throw ConfigError("acquisition.duration_s: fewer than 2 samples");

  if (!(mixing.a != 0.0)) throw ConfigError("mixing.a_v_per_rad: must be nonzero");
  if (!(mixing.d != 0.0)) throw ConfigError("mixing.d_v_per_rad: must be nonzero");
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");
  const std::set<std::string> sections{"magnet", "trap", "libration", "acquisition", "mixing"};
  for (const auto& [key, value] : root.items())
    if (!sections.count(key)) throw ConfigError(key + ": unknown section");

  RunConfig c;
  const Section magnet(root, "magnet", {"radius_um", "magnetization_kA_per_m", "density_kg_per_m3"});
  magnet.read("radius_um", c.magnet.radius_um);
  magnet.read("magnetization_kA_per_m", c.magnet.magnetization_kA_per_m);
  magnet.read("density_kg_per_m3", c.magnet.density_kg_per_m3);

  const Section trap(root, "trap", {"radius_mm", "g0_m_per_s2"});
  trap.read("radius_mm", c.trap.radius_mm);
  trap.read("g0_m_per_s2", c.trap.g0_m_per_s2);

  const Section lib(root, "libration",
                    {"f_alpha_hz", "f_beta_hz", "f_I_hz", "gamma_dot_rad_per_s", "eps_alpha", "eps_beta",
                     "damping_time_s", "temperature_k"});
  if (!lib.has("f_alpha_hz"))
    throw ConfigError("libration.f_alpha_hz: required (the alpha mode is set by the residual field)");
  lib.read("f_alpha_hz", c.libration.f_alpha_hz);
  lib.read("f_beta_hz", c.libration.f_beta_hz);
  lib.read("f_I_hz", c.libration.f_I_hz);
  lib.read("gamma_dot_rad_per_s", c.libration.gamma_dot_rad_per_s);
  lib.read("eps_alpha", c.libration.eps_alpha);
  lib.read("eps_beta", c.libration.eps_beta);
  lib.read("damping_time_s", c.libration.damping_time_s);
  lib.read("temperature_k", c.libration.temperature_k);

  const Section acq(root, "acquisition",
                    {"sample_rate_hz", "duration_s", "repetitions_alpha", "repetitions_beta", "excitation_rad",
                     "noise_rms_v", "seed"});
  acq.read("sample_rate_hz", c.acquisition.sample_rate_hz);
  acq.read("duration_s", c.acquisition.duration_s);
  acq.read_count("repetitions_alpha", c.acquisition.repetitions_alpha);
  acq.read_count("repetitions_beta", c.acquisition.repetitions_beta);
  acq.read("excitation_rad", c.acquisition.excitation_rad);
  acq.read("noise_rms_v", c.acquisition.noise_rms_v);
  acq.read_count("seed", c.acquisition.seed);

  const Section mix(root, "mixing", {"a_v_per_rad", "b_v_per_rad", "c_v_per_rad", "d_v_per_rad"});
  mix.read("a_v_per_rad", c.mixing.a);
  mix.read("b_v_per_rad", c.mixing.b);
  mix.read("c_v_per_rad", c.mixing.c);
  mix.read("d_v_per_rad", c.mixing.d);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["magnet"]["radius_um"] = c.magnet.radius_um;
  j["magnet"]["magnetization_kA_per_m"] = c.magnet.magnetization_kA_per_m;
  j["magnet"]["density_kg_per_m3"] = c.magnet.density_kg_per_m3;
  j["trap"]["radius_mm"] = c.trap.radius_mm;
  j["trap"]["g0_m_per_s2"] = c.trap.g0_m_per_s2;
  auto& l = j["libration"];
  l["f_alpha_hz"] = c.libration.f_alpha_hz;
  if (c.libration.f_beta_hz) l["f_beta_hz"] = *c.libration.f_beta_hz;
  if (c.libration.f_I_hz) l["f_I_hz"] = *c.libration.f_I_hz;
  l["gamma_dot_rad_per_s"] = c.libration.gamma_dot_rad_per_s;
  l["eps_alpha"] = c.libration.eps_alpha;
  l["eps_beta"] = c.libration.eps_beta;
  l["damping_time_s"] = c.libration.damping_time_s;
  l["temperature_k"] = c.libration.temperature_k;
  auto& a = j["acquisition"];
  a["sample_rate_hz"] = c.acquisition.sample_rate_hz;
  a["duration_s"] = c.acquisition.duration_s;
  a["repetitions_alpha"] = c.acquisition.repetitions_alpha;
  a["repetitions_beta"] = c.acquisition.repetitions_beta;
  a["excitation_rad"] = c.acquisition.excitation_rad;
  a["noise_rms_v"] = c.acquisition.noise_rms_v;
  a["seed"] = c.acquisition.seed;
  j["mixing"]["a_v_per_rad"] = c.mixing.a;
  j["mixing"]["b_v_per_rad"] = c.mixing.b;
  j["mixing"]["c_v_per_rad"] = c.mixing.c;
  j["mixing"]["d_v_per_rad"] = c.mixing.d;
  return j.dump(2) + "\n";
}

}  // namespace gyrolev::app
