#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "biphoton/error.hpp"
#include "biphoton/io.hpp"

namespace biphoton::cli {

using nlohmann::json;

namespace {



json default_document() {
  return json{
      {"source",
       {{"f", 1.0}, {"f_imag", 0.0}, {"pair_rate", 1e4}, {"background_rate", 0.0},
        {"acquisition", 1.0}}},
      {"analyzers",
       {{"theta1", 67.5}, {"theta2", 45.0}, {"theta1p", 22.5}, {"theta2p", 0.0},
        {"eps_par1", 1.0}, {"eps_perp1", 0.0}, {"eps_par2", 1.0}, {"eps_perp2", 0.0},
        {"fixed_angle", 45.0}, {"scan_steps", 720}}},
      {"efficiencies", {{"eta1", 1.0}, {"eta2", 1.0}}},
      {"bell", {{"form", "substituted"}, {"grid_step", 1.0}, {"threads", 0}}},
      {"loophole",
       {{"f_min", 0.02}, {"f_max", 1.0}, {"f_steps", 50}, {"eta_min", 0.5},
        {"eta_max", 1.0}, {"eta_steps", 50}}},
      {"casado",
       {{"eta", 0.51}, {"focal_length", 0.009}, {"crystal_radius", 1e-3},
        {"coherence_time", 4.2e-13}, {"distance", 0.75}, {"wavelength", 711e-9},
        {"active_depth", 3e-5}, {"singles_rate", 1e5}, {"visibility", 0.98},
        {"ch_positive", true}, {"admissible_absorption_time", 10e-9},
        {"visibility_threshold", 0.9}}},
      {"calibration",
       {{"pair_rate", 1e5}, {"eta1", 0.51}, {"eta2", 0.30}, {"dark1", 50.0}, {"dark2", 50.0},
        {"coincidence_window", 10e-9}, {"acquisition", 100.0}, {"dead_time", 0.0},
        {"seeds", 100}}},
      {"double_slit",
       {{"separation", 100e-6}, {"width", 10e-6}, {"wavelength", 702e-9},
        {"relative_phase", 0.0}, {"distance1", 1.21}, {"distance2", 1.5},
        {"aperture1", 2e-3}, {"aperture2", 6e-3}, {"x1_min", -0.03}, {"x1_max", 0.03},
        {"x1_steps", 61}, {"x2_min", -0.06}, {"x2_max", 0.06}, {"x2_steps", 121},
        {"fixed_x2", -0.01}, {"chi2_x1_min", -0.0075}, {"chi2_x1_step", 0.0025},
        {"chi2_points", 7}, {"peak_counts", 100.0}, {"fit_background", false}}},
      {"qkd",
       {{"channel", "double"}, {"rounds", 100000}, {"phi", 0.0}, {"f_pol", 1.0},
        {"eve", "none"}, {"intercept_fraction", 1.0}, {"eve_target", "both"},
        {"sweep_fractions", json::array({0.0, 0.5, 1.0})}, {"metric", "all"},
        {"information_target", 0.2}}},
      {"rng", {{"seed", 1}}},
  };
}

const char* type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

bool compatible(const json& def, const json& v) {
  if (def.is_number()) return v.is_number();
  if (def.is_array()) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_number()) return false;
    }
    return true;
  }
  return std::string_view(type_name(def)) == type_name(v);
}

std::string key_name(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

}  // namespace

ExperimentConfig::ExperimentConfig() : doc_(default_document()) {}

void ExperimentConfig::merge(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [section, body] : doc.items()) {
    if (!doc_.contains(section)) throw ConfigError("config: unknown section '" + section + "'");
    if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& [key, v] : body.items()) {
      auto& sec = doc_[section];
      if (!sec.contains(key)) throw ConfigError("config: unknown key '" + key_name(section, key) + "'");
      if (!compatible(sec[key], v)) {
        throw ConfigError("config: '" + key_name(section, key) + "' must be a " +
                          type_name(sec[key]));
      }
      sec[key] = v;
    }
  }
}

void ExperimentConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  merge(doc);
}

void ExperimentConfig::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("--set expects section.key=value, got '" + std::string(assignment) + "'");
  }
  const std::string section(assignment.substr(0, dot));
  const std::string key(assignment.substr(dot + 1, eq - dot - 1));
  const std::string text(assignment.substr(eq + 1));
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) v = text;
  merge(json{{section, {{key, v}}}});
}

std::uint64_t ExperimentConfig::hash() const { return io::fnv1a_64(doc_.dump()); }

const json& ExperimentConfig::value(std::string_view section, std::string_view key) const {
  return doc_.at(std::string(section)).at(std::string(key));
}

double ExperimentConfig::number(std::string_view section, std::string_view key) const {
  return value(section, key).get<double>();
}

std::int64_t ExperimentConfig::integer(std::string_view section, std::string_view key) const {
  const double v = number(section, key);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
    throw ConfigError("config: '" + key_name(section, key) + "' must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

bool ExperimentConfig::flag(std::string_view section, std::string_view key) const {
  return value(section, key).get<bool>();
}

std::string ExperimentConfig::text(std::string_view section, std::string_view key) const {
  return value(section, key).get<std::string>();
}

std::vector<double> ExperimentConfig::numbers(std::string_view section,
                                              std::string_view key) const {
  return value(section, key).get<std::vector<double>>();
}

std::uint64_t ExperimentConfig::seed() const {
  const auto s = integer("rng", "seed");
  if (s < 0) throw ConfigError("config: rng.seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string ExperimentConfig::describe() {
  std::ostringstream out;
  const json d = default_document();
  for (const auto& [section, body] : d.items()) {
    for (const auto& [key, v] : body.items()) out << "  " << section << '.' << key << " = " << v.dump() << '\n';
  }
  return out.str();
}

BiphotonState ExperimentConfig::state() const {
  return BiphotonState({number("source", "f"), number("source", "f_imag")});
}

bell::ChConfiguration ExperimentConfig::ch_configuration() const {
  bell::ChConfiguration c;
  c.theta1 = number("analyzers", "theta1");
  c.theta2 = number("analyzers", "theta2");
  c.theta1p = number("analyzers", "theta1p");
  c.theta2p = number("analyzers", "theta2p");
  c.analyzers = {bell::AnalyzerQuality{number("analyzers", "eps_par1"), number("analyzers", "eps_perp1")},
                 bell::AnalyzerQuality{number("analyzers", "eps_par2"), number("analyzers", "eps_perp2")}};
  c.efficiency = {number("efficiencies", "eta1"), number("efficiencies", "eta2")};
  c.validate();
  return c;
}

bell::ChForm ExperimentConfig::ch_form() const {
  const auto f = text("bell", "form");
  if (f == "substituted") return bell::ChForm::substituted;
  if (f == "strict") return bell::ChForm::strict;
  throw ConfigError("config: bell.form must be 'substituted' or 'strict'");
}

bell::OptimizerOptions ExperimentConfig::optimizer() const {
  bell::OptimizerOptions o;
  o.grid_step_deg = number("bell", "grid_step");
  if (!(o.grid_step_deg > 0.0 && o.grid_step_deg <= 45.0)) {
    throw ConfigError("config: bell.grid_step must lie in (0, 45]");
  }
  return o;
}

bell::RateModel ExperimentConfig::rate_model() const {
  return {number("source", "pair_rate"), number("source", "background_rate"),
          number("source", "acquisition")};
}

namespace {

std::vector<double> linspace(double lo, double hi, std::int64_t n) {
  if (n < 1) throw ConfigError("config: grid needs at least one step");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

}  // namespace

std::vector<double> ExperimentConfig::loophole_f_grid() const {
  return linspace(number("loophole", "f_min"), number("loophole", "f_max"),
                  integer("loophole", "f_steps"));
}

std::vector<double> ExperimentConfig::loophole_eta_grid() const {
  return linspace(number("loophole", "eta_min"), number("loophole", "eta_max"),
                  integer("loophole", "eta_steps"));
}

lhv::CasadoParameters ExperimentConfig::casado() const {
  lhv::CasadoParameters p;
  p.eta = number("casado", "eta");
  p.focal_length = number("casado", "focal_length");
  p.crystal_radius = number("casado", "crystal_radius");
  p.coherence_time = number("casado", "coherence_time");
  p.distance = number("casado", "distance");
  p.wavelength = number("casado", "wavelength");
  p.active_depth = number("casado", "active_depth");
  p.absorption_time = 1.0;
  return p;
}

lhv::VerdictOptions ExperimentConfig::verdict_options() const {
  return {number("casado", "admissible_absorption_time"), number("casado", "visibility_threshold")};
}

calibration::CalibrationScenario ExperimentConfig::calibration() const {
  calibration::CalibrationScenario s;
  s.pair_rate = number("calibration", "pair_rate");
  s.eta1 = number("calibration", "eta1");
  s.eta2 = number("calibration", "eta2");
  s.dark1 = number("calibration", "dark1");
  s.dark2 = number("calibration", "dark2");
  s.coincidence_window = number("calibration", "coincidence_window");
  s.acquisition = number("calibration", "acquisition");
  s.dead_time = number("calibration", "dead_time");
  s.seed = seed();
  s.validate();
  return s;
}

double_slit::SlitGeometry ExperimentConfig::slit_geometry() const {
  double_slit::SlitGeometry g;
  g.separation = number("double_slit", "separation");
  g.width = number("double_slit", "width");
  g.wavelength = number("double_slit", "wavelength");
  g.relative_phase = number("double_slit", "relative_phase");
  g.validate();
  return g;
}

double_slit::DetectorPlane ExperimentConfig::plane(int which) const {
  const std::string n = which == 1 ? "1" : "2";
  double_slit::DetectorPlane p;
  p.distance = number("double_slit", "distance" + n);
  p.aperture = number("double_slit", "aperture" + n);
  p.positions = linspace(number("double_slit", "x" + n + "_min"),
                         number("double_slit", "x" + n + "_max"),
                         integer("double_slit", "x" + n + "_steps"));
  p.validate();
  return p;
}

qkd::DoubleEntangledState ExperimentConfig::qkd_state() const {
  return {number("qkd", "phi"), {number("qkd", "f_pol"), 0.0}};
}

qkd::ChannelKind ExperimentConfig::qkd_channel() const {
  const auto c = text("qkd", "channel");
  if (c == "double") return qkd::ChannelKind::double_entangled;
  if (c == "single") return qkd::ChannelKind::single_entangled;
  throw ConfigError("config: qkd.channel must be 'single' or 'double'");
}

qkd::EveStrategy ExperimentConfig::qkd_eve() const {
  qkd::EveStrategy e;
  const auto kind = text("qkd", "eve");
  if (kind == "none") e.kind = qkd::EveKind::none;
  else if (kind == "fixed") e.kind = qkd::EveKind::fixed_basis;
  else if (kind == "breidbart") e.kind = qkd::EveKind::breidbart;
  else throw ConfigError("config: qkd.eve must be none, fixed or breidbart");
  const auto target = text("qkd", "eve_target");
  if (target == "both") e.target = qkd::EveTarget::both;
  else if (target == "polarization") e.target = qkd::EveTarget::polarization;
  else if (target == "phase") e.target = qkd::EveTarget::phase;
  else throw ConfigError("config: qkd.eve_target must be polarization, phase or both");
  e.intercept_fraction = number("qkd", "intercept_fraction");
  e.validate();
  return e;
}

qkd::InformationMetric ExperimentConfig::qkd_metric() const {
  const auto m = text("qkd", "metric");
  if (m == "mutual_information") return qkd::InformationMetric::mutual_information;
  if (m == "full_symbol_guess") return qkd::InformationMetric::full_symbol_guess;
  if (m == "full_symbol_certainty") return qkd::InformationMetric::full_symbol_certainty;
  throw ConfigError("config: unknown qkd.metric '" + m + "'");
}

}  // namespace biphoton::cli
