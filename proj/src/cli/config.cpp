#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lyzero/cli.hpp"
#include "lyzero/error.hpp"

namespace lyzero {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

double positive(const json& j, const char* key, double fallback) {
  const double v = j.value(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) config_error(std::string(key) + " must be positive and finite");
  return v;
}

Temperature parse_temperature(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return Temperature::inf();
    config_error("temperature string must be \"inf\"");
  }
  if (!j.is_number()) config_error("temperature must be a number or \"inf\"");
  const double t = j.get<double>();
  if (t == 0.0) config_error("zero temperature is not supported");
  if (!(t > 0.0) || !std::isfinite(t)) config_error("temperature must be positive");
  return {t, false};
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> TimeGrid::lambda_t() const {
  std::vector<double> out(static_cast<std::size_t>(samples));
  if (samples == 1) {
    out[0] = lambda_t_min;
    return out;
  }
  const double step = (lambda_t_max - lambda_t_min) / (samples - 1);
  for (int i = 0; i < samples; ++i) out[static_cast<std::size_t>(i)] = lambda_t_min + i * step;
  out.back() = lambda_t_max;
  return out;
}

double BathConfig::reference_coupling() const {
  if (energy_unit) return *energy_unit;
  if (ring_coupling) return std::abs(*ring_coupling);
  double m = 0.0;
  for (const auto& b : spec.bonds) m = std::max(m, std::abs(b.coupling));
  return m > 0.0 ? m : 1.0;
}

ExperimentConfig ExperimentConfig::figure_defaults() {
  ExperimentConfig c;
  c.bath.spec = BathSpec::ring(10, 1.0, 1.0);
  c.bath.ring_coupling = 1.0;
  c.temperatures = {Temperature::inf(), {1.0, false}, {0.25, false}, {0.125, false}};
  const double j = 1.0 / (2.0 * std::numbers::pi);
  c.probe = ProbeParams::symmetric(j, j, 0.0, 1.0);
  c.initial_state = ProbeState::x_projected();
  return c;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  ExperimentConfig c = ExperimentConfig::figure_defaults();
  try {
    if (j.contains("bath")) {
      const json& b = j.at("bath");
      try {
        c.bath.spec = b.get<BathSpec>();
      } catch (const Error& e) {
        config_error(std::string("bath: ") + e.what());
      }
      c.bath.ring_coupling.reset();
      if (b.value("topology", std::string()) == "ring") c.bath.ring_coupling = b.at("coupling").get<double>();
      c.bath.energy_unit.reset();
      if (b.contains("energy_unit")) c.bath.energy_unit = positive(b, "energy_unit", 1.0);
    }
    if (j.contains("temperatures")) {
      c.temperatures.clear();
      for (const auto& t : j.at("temperatures")) c.temperatures.push_back(parse_temperature(t));
    }
    if (j.contains("probe")) {
      const json& p = j.at("probe");
      const double lambda = p.value("lambda", 1.0);
      const double j_xx = p.value("j_xx", c.probe.j_xx);
      c.probe.j_xx = j_xx;
      c.probe.j_zz = p.value("j_zz", j_xx);
      c.probe.h0 = p.value("h0", 0.0);
      c.probe.lambda_a = p.value("lambda_a", lambda);
      c.probe.lambda_b = p.value("lambda_b", lambda);
      for (double v : {c.probe.j_xx, c.probe.j_zz, c.probe.h0, c.probe.lambda_a, c.probe.lambda_b}) {
        if (!std::isfinite(v)) config_error("probe parameters must be finite");
      }
      if (!(c.probe.lambda_a > 0.0)) config_error("lambda_a must be positive");
    }
    if (j.contains("initial_state")) {
      const auto v = j.at("initial_state").get<std::vector<double>>();
      if (v.size() != 8) config_error("initial_state needs 8 numbers (re, im) x 4");
      ProbeState::Amplitudes a;
      for (std::size_t i = 0; i < 4; ++i) a[i] = {v[2 * i], v[2 * i + 1]};
      c.initial_state = ProbeState(a);
    }
    if (j.contains("time_grid")) {
      const json& g = j.at("time_grid");
      c.grid.lambda_t_min = g.value("lambda_t_min", c.grid.lambda_t_min);
      c.grid.lambda_t_max = g.value("lambda_t_max", c.grid.lambda_t_max);
      c.grid.samples = g.value("samples", c.grid.samples);
      if (c.grid.samples < 2 || !(c.grid.lambda_t_max > c.grid.lambda_t_min)) {
        config_error("time_grid needs samples >= 2 and lambda_t_max > lambda_t_min");
      }
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      c.tolerances.circle_tol = positive(t, "circle_tol", c.tolerances.circle_tol);
      c.tolerances.refine_tol = positive(t, "refine_tol", c.tolerances.refine_tol);
      c.tolerances.cluster_tol = positive(t, "cluster_tol", c.tolerances.cluster_tol);
      c.tolerances.detect_threshold = positive(t, "detect_threshold", c.tolerances.detect_threshold);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.enumeration_cap = j.value("enumeration_cap", c.enumeration_cap);
    c.verify_draws = j.value("verify_draws", c.verify_draws);
    if (c.enumeration_cap < 1 || c.enumeration_cap > 63) config_error("enumeration_cap out of range");
    if (c.verify_draws < 0) config_error("verify_draws must be nonnegative");
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  return c;
}

json serialize_config(const ExperimentConfig& c) {
  json bath;
  if (c.bath.ring_coupling) {
    bath = {{"topology", "ring"},
            {"n_sites", c.bath.spec.n_sites},
            {"coupling", *c.bath.ring_coupling},
            {"field_h", c.bath.spec.field_h},
            {"beta", c.bath.spec.beta}};
  } else {
    bath = c.bath.spec;
  }
  if (c.bath.energy_unit) bath["energy_unit"] = *c.bath.energy_unit;

  json temps = json::array();
  for (const auto& t : c.temperatures) {
    if (t.infinite) {
      temps.push_back("inf");
    } else {
      temps.push_back(t.value);
    }
  }
  json state = json::array();
  for (const auto& a : c.initial_state.amplitudes()) {
    state.push_back(a.real());
    state.push_back(a.imag());
  }
  return {{"bath", bath},
          {"temperatures", temps},
          {"probe",
           {{"j_xx", c.probe.j_xx},
            {"j_zz", c.probe.j_zz},
            {"h0", c.probe.h0},
            {"lambda_a", c.probe.lambda_a},
            {"lambda_b", c.probe.lambda_b}}},
          {"initial_state", state},
          {"time_grid",
           {{"lambda_t_min", c.grid.lambda_t_min},
            {"lambda_t_max", c.grid.lambda_t_max},
            {"samples", c.grid.samples}}},
          {"tolerances",
           {{"circle_tol", c.tolerances.circle_tol},
            {"refine_tol", c.tolerances.refine_tol},
            {"cluster_tol", c.tolerances.cluster_tol},
            {"detect_threshold", c.tolerances.detect_threshold}}},
          {"output_dir", c.output_dir},
          {"enumeration_cap", c.enumeration_cap},
          {"verify_draws", c.verify_draws}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = serialize_config(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<TemperaturePoint> temperature_points(const ExperimentConfig& config) {
  if (config.temperatures.empty()) {
    const double beta = config.bath.spec.beta;
    return {{"beta_" + format_number(beta), beta}};
  }
  const double unit = config.bath.reference_coupling();
  std::vector<TemperaturePoint> out;
  for (const auto& t : config.temperatures) {
    if (t.infinite) {
      out.push_back({"T_inf", 0.0});
    } else {
      out.push_back({"T_" + format_number(t.value), 1.0 / (t.value * unit)});
    }
  }
  return out;
}

}  // namespace lyzero
