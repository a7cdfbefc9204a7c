#include "isac_edge/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isac_edge/error.hpp"

namespace isac_edge {

namespace {

using nlohmann::json;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Schema, where + ": " + what);
}

// Typed access to one JSON object that remembers which keys were consumed,
// so leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_error(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) schema_error(path_, "missing key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) schema_error(where(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) schema_error(where(key), "expected a finite number");
    return x;
  }

  std::optional<double> maybe_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) schema_error(where(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  /// Exactly one of the given spellings must be present; returns the value
  /// converted to linear units.
  double either(std::initializer_list<std::pair<const char*, double (*)(double)>> forms) {
    std::string names;
    for (const auto& form : forms) names += (names.empty() ? "" : " / ") + std::string(form.first);
    std::optional<double> out;
    for (const auto& [key, convert] : forms) {
      if (!has(key)) continue;
      if (out) schema_error(path_, "give only one of " + names);
      const double x = number(key);
      out = convert ? convert(x) : x;
    }
    if (!out) schema_error(path_, "missing one of " + names);
    return *out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) schema_error(path_, "unknown key '" + it.key() + "'");
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const json& array_at(ObjectReader& r, const std::string& key) {
  const json& a = r.raw(key);
  if (!a.is_array()) schema_error(r.where(key), "expected an array");
  return a;
}

SystemConfig parse_system(ObjectReader r) {
  SystemConfig cfg;
  const std::int64_t n = r.integer("num_antennas");
  if (n < 1 || n > 4096) schema_error(r.where("num_antennas"), "must be in [1, 4096]");
  cfg.num_antennas = static_cast<int>(n);
  cfg.max_power = r.either({{"max_power", nullptr}, {"max_power_dbm", dbm_to_watts}});
  cfg.noise_power = r.either({{"noise_power", nullptr}, {"noise_power_dbm", dbm_to_watts}});
  cfg.clutter_power =
      r.either({{"clutter_power", nullptr}, {"clutter_power_dbm", dbm_to_watts}});
  cfg.bandwidth = r.number("bandwidth");
  cfg.sample_bits = r.number("sample_bits");
  cfg.total_time = r.number("total_time");
  cfg.sensing_time_per_sample = r.number("sensing_time_per_sample");
  r.finish();
  return cfg;
}

TargetGeometry parse_target(ObjectReader r) {
  TargetGeometry t;
  t.distance = r.number("distance");
  t.angle = r.either({{"angle", nullptr}, {"angle_deg", deg_to_rad}});
  t.echo_gain = r.either({{"echo_gain", nullptr}, {"echo_gain_db", amplitude_from_db}});
  r.finish();
  return t;
}

// Reference gain needs the system block when it is given as a link SNR.
SceneGeometry parse_geometry(ObjectReader r, const SystemConfig& cfg) {
  SceneGeometry g;
  g.antenna_spacing = r.number("antenna_spacing");
  g.wavelength = r.number("wavelength");
  g.path_loss_exponent = r.number("path_loss_exponent");
  g.server_distance = r.number("server_distance");
  g.server_angle = r.either({{"server_angle", nullptr}, {"server_angle_deg", deg_to_rad}});
  g.fading_std = r.maybe_number("fading_std").value_or(0.0);

  const int forms = r.has("reference_gain") + r.has("reference_gain_db") + r.has("server_snr_db");
  if (forms != 1) {
    schema_error("geometry",
                 "give exactly one of reference_gain / reference_gain_db / server_snr_db");
  }
  if (r.has("server_snr_db")) {
    g.reference_gain = calibrated_reference_gain(cfg, g, r.number("server_snr_db"));
  } else {
    g.reference_gain =
        r.either({{"reference_gain", nullptr}, {"reference_gain_db", db_to_linear}});
  }

  const json& targets = array_at(r, "targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "geometry.targets[" + std::to_string(i) + "]";
    g.targets.push_back(parse_target(ObjectReader(targets[i], where)));
  }
  r.finish();
  return g;
}

TaskSpec parse_task(ObjectReader r) {
  TaskSpec t;
  t.sensing_threshold = r.either({{"eta", nullptr}, {"eta_db", db_to_linear}});
  t.error.coefficient = r.number("a");
  t.error.exponent = r.number("b");
  r.finish();
  return t;
}

json vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v[k].real(), v[k].imag()});
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what());
  }

  ObjectReader top(doc, "scenario");
  Scenario s;
  // The geometry block may depend on the system block, so read that first.
  s.system = parse_system(ObjectReader(top.raw("system"), "system"));
  const json& tasks = array_at(top, "tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    s.system.tasks.push_back(parse_task(ObjectReader(tasks[i], where)));
  }
  s.geometry = parse_geometry(ObjectReader(top.raw("geometry"), "geometry"), s.system);
  if (top.has("seed")) {
    const std::int64_t seed = top.integer("seed");
    if (seed < 0) schema_error("scenario.seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  s.target_error = top.maybe_number("target_error");
  top.finish();

  s.system.validate();
  s.geometry.validate();
  if (s.geometry.targets.size() != s.system.num_tasks()) {
    schema_error("scenario", "geometry.targets and tasks must have the same length");
  }
  if (s.target_error && !(*s.target_error > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "target_error must be positive");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read scenario file '" + path + "'");
  return parse_scenario(buf.str());
}

std::string report_to_json(const RunReport& report, const SystemConfig& cfg) {
  json isac_phases = json::array();
  for (std::size_t m = 0; m < report.isac.phases.size(); ++m) {
    const TaskPhase& p = report.isac.phases[m];
    isac_phases.push_back({
        {"task", m},
        {"duration_s", p.duration},
        {"sinr_com", p.sinr_com},
        {"sinr_sen", p.sinr_sen},
        {"sensing_threshold", cfg.tasks.at(m).sensing_threshold},
        {"sample_rate", p.sample_rate},
        {"sensing_limit", p.budget.sensing_limit},
        {"comm_limit", p.budget.comm_limit},
        {"samples", p.budget.samples},
        {"error", p.error},
        {"binding", to_string(p.binding)},
        {"power_used", p.beams.power_used},
        {"radar_beam", vector_json(p.beams.radar)},
        {"data_beam", vector_json(p.beams.data)},
    });
  }
  json conv_phases = json::array();
  for (std::size_t m = 0; m < report.conventional.phases.size(); ++m) {
    const ConventionalPhase& p = report.conventional.phases[m];
    conv_phases.push_back({{"task", m},
                           {"sensing_time_s", p.sensing_time},
                           {"comm_time_s", p.comm_time},
                           {"samples", p.samples},
                           {"error", p.error}});
  }
  const json doc = {
      {"mode", to_string(report.mode)},
      {"regime", to_string(report.regime)},
      {"isac_time_s", report.isac_time},
      {"conv_time_s", report.conv_time},
      {"gain_measured", report.gain_measured},
      {"gain_analytic", report.gain_analytic},
      {"max_err_isac", report.max_err_isac},
      {"max_err_conv", report.max_err_conv},
      {"isac",
       {{"mu_star", report.isac.mu_star},
        {"total_time_s", report.isac.total_time},
        {"max_error", report.isac.max_error},
        {"phases", isac_phases}}},
      {"conventional",
       {{"rate", report.conventional.rate},
        {"sample_cost_s", report.conventional.sample_cost},
        {"mu_star", report.conventional.mu_star},
        {"total_time_s", report.conventional.total_time},
        {"max_error", report.conventional.max_error},
        {"phases", conv_phases}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace isac_edge
