#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biphoton/polarization.hpp"

namespace biphoton::calibration {

/// Two-detector PDC calibration run.  Rates in 1/s, times in s.
struct CalibrationScenario {
  double pair_rate = 1e5;
  double eta1 = 0.51;
  double eta2 = 0.30;
  double dark1 = 0.0;
  double dark2 = 0.0;
  double coincidence_window = 10e-9;
  double acquisition = 100.0;
  /// Non-paralyzable dead time applied to both detectors (0 disables it).
  double dead_time = 0.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct RawCounts {
  std::uint64_t pairs = 0;    ///< emitted pairs (not observable)
  std::uint64_t n1 = 0;       ///< singles, arm 1
  std::uint64_t n2 = 0;       ///< singles, arm 2
  std::uint64_t nc = 0;       ///< coincidences, including accidentals
  double accidental = 0.0;    ///< estimated accidentals N1 N2 w / T
};

struct CalibrationResult {
  Arm estimated = Arm::first;  ///< whose efficiency eta_hat refers to
  double eta_hat = 0.0;
  double standard_error = 0.0;
  RawCounts raw;
};

/// Simulate counts and estimate eta of `target` as (Nc - acc) / (N_other - dark_other T).
///
/// Pairs ~ Poisson(pair_rate T) are thinned per arm, dark counts are added
/// as independent Poisson counts, and accidental coincidences are drawn as
/// Poisson(N1 N2 w / T).  Reproducible from scenario.seed.
/// Throws EstimationError when the corrected trigger count is not
/// significantly positive.
CalibrationResult simulate_calibration(const CalibrationScenario& s, Arm target = Arm::first);

/// Estimator from given counts; same rules as simulate_calibration.
CalibrationResult estimate_efficiency(const RawCounts& raw, const CalibrationScenario& s,
                                      Arm target = Arm::first);

struct BiasRow {
  CalibrationScenario scenario;
  std::size_t seeds = 0;
  std::size_t failures = 0;
  bool flagged = false;        ///< every seed failed
  double mean_estimate = 0.0;
  double bias = 0.0;           ///< mean_estimate - eta1
  double bias_stderr = 0.0;    ///< spread of estimates / sqrt(successes)
  double mean_stderr = 0.0;    ///< average reported stderr
  double coverage_2sigma = 0.0;  ///< fraction with |eta_hat - eta1| <= 2 stderr
};

/// Runs each scenario with seeds scenario.seed, scenario.seed + 1, ...
/// Throws std::invalid_argument for an empty grid or zero seeds.
std::vector<BiasRow> estimator_bias_scan(std::span<const CalibrationScenario> grid,
                                         std::size_t seeds_per_cell);

}  // namespace biphoton::calibration
