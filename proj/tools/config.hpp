#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "biphoton/bell.hpp"
#include "biphoton/calibration.hpp"
#include "biphoton/double_slit.hpp"
#include "biphoton/lhv_bounds.hpp"
#include "biphoton/qkd.hpp"

namespace biphoton::cli {

/// Experiment configuration: a JSON object of sections, each a flat object
/// of keys.  Every key has a default; documents may only override known
/// keys with values of the same type.  Units: meters, seconds, degrees for
/// analyzer angles, radians for phases.
class ExperimentConfig {
 public:
  ExperimentConfig();

  /// Throws ConfigError on unknown sections/keys or type mismatches.
  void merge(const nlohmann::json& doc);
  void merge_file(const std::string& path);
  /// "section.key=value"; value is parsed as JSON, else taken as a string.
  void set(std::string_view assignment);

  const nlohmann::json& document() const noexcept { return doc_; }
  std::uint64_t hash() const;
  std::uint64_t seed() const;

  double number(std::string_view section, std::string_view key) const;
  std::int64_t integer(std::string_view section, std::string_view key) const;
  bool flag(std::string_view section, std::string_view key) const;
  std::string text(std::string_view section, std::string_view key) const;
  std::vector<double> numbers(std::string_view section, std::string_view key) const;

  /// Human-readable key listing with defaults, for --help.
  static std::string describe();

  BiphotonState state() const;
  bell::ChConfiguration ch_configuration() const;
  bell::ChForm ch_form() const;
  bell::OptimizerOptions optimizer() const;
  bell::RateModel rate_model() const;
  std::vector<double> loophole_f_grid() const;
  std::vector<double> loophole_eta_grid() const;
  lhv::CasadoParameters casado() const;
  lhv::VerdictOptions verdict_options() const;
  calibration::CalibrationScenario calibration() const;
  double_slit::SlitGeometry slit_geometry() const;
  double_slit::DetectorPlane plane(int which) const;
  qkd::DoubleEntangledState qkd_state() const;
  qkd::ChannelKind qkd_channel() const;
  qkd::EveStrategy qkd_eve() const;
  qkd::InformationMetric qkd_metric() const;

 private:
  const nlohmann::json& value(std::string_view section, std::string_view key) const;
  nlohmann::json doc_;
};

}  // namespace biphoton::cli
