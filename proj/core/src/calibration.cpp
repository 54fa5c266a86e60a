#include "biphoton/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biphoton/error.hpp"
#include "biphoton/mc/rng.hpp"
#include "biphoton/mc/sampling.hpp"
#include "biphoton/mc/tally.hpp"

namespace biphoton::calibration {

void CalibrationScenario::validate() const {
  const auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!nonneg(pair_rate) || !nonneg(dark1) || !nonneg(dark2) || !nonneg(dead_time) ||
      !nonneg(coincidence_window)) {
    throw std::invalid_argument("CalibrationScenario: rates and times must be nonnegative");
  }
  if (!(eta1 >= 0.0 && eta1 <= 1.0) || !(eta2 >= 0.0 && eta2 <= 1.0)) {
    throw std::invalid_argument("CalibrationScenario: efficiencies must lie in [0, 1]");
  }
  if (!(acquisition > 0.0) || !std::isfinite(acquisition)) {
    throw std::invalid_argument("CalibrationScenario: acquisition must be positive");
  }
}

namespace {

// Live-time fraction of a non-paralyzable detector with true rate r.
double live_fraction(double rate, double dead_time) { return 1.0 / (1.0 + rate * dead_time); }

}  // namespace

CalibrationResult estimate_efficiency(const RawCounts& raw, const CalibrationScenario& s,
                                      Arm target) {
  const double t = s.acquisition;
  double n1 = static_cast<double>(raw.n1);
  double n2 = static_cast<double>(raw.n2);
  double nc = static_cast<double>(raw.nc) - raw.accidental;
  if (s.dead_time > 0.0) {
    // Invert m = n / (1 + n tau / T) per arm; a coincidence needs both arms live.
    const double l1 = 1.0 - n1 * s.dead_time / t;
    const double l2 = 1.0 - n2 * s.dead_time / t;
    if (!(l1 > 0.0 && l2 > 0.0)) throw EstimationError("calibration: detector saturated");
    n1 /= l1;
    n2 /= l2;
    nc /= l1 * l2;
  }
  const double dark_other = (target == Arm::first ? s.dark2 : s.dark1) * t;
  const double trigger = (target == Arm::first ? n2 : n1) - dark_other;
  if (!(trigger > 0.0) || trigger < 3.0 * std::sqrt(dark_other)) {
    throw EstimationError("calibration: corrected trigger count is not significantly positive");
  }
  CalibrationResult r;
  r.estimated = target;
  r.raw = raw;
  r.eta_hat = nc / trigger;
  const double p = std::clamp(r.eta_hat, 0.0, 1.0);
  const double var = p * (1.0 - p) / trigger +
                     (raw.accidental + r.eta_hat * r.eta_hat * dark_other) / (trigger * trigger);
  r.standard_error = std::sqrt(var);
  return r;
}

CalibrationResult simulate_calibration(const CalibrationScenario& s, Arm target) {
  s.validate();
  mc::RngStream rng(s.seed, 0, mc::domain::calibration);
  const double t = s.acquisition;

  RawCounts raw;
  raw.pairs = mc::poisson_sample(rng, s.pair_rate * t);
  const std::uint64_t det1 = mc::binomial_sample(rng, raw.pairs, s.eta1);
  std::uint64_t both = mc::binomial_sample(rng, det1, s.eta2);
  std::uint64_t only2 = mc::binomial_sample(rng, raw.pairs - det1, s.eta2);
  std::uint64_t only1 = det1 - both;
  std::uint64_t dark1 = mc::poisson_sample(rng, s.dark1 * t);
  std::uint64_t dark2 = mc::poisson_sample(rng, s.dark2 * t);

  if (s.dead_time > 0.0) {
    const double r1 = static_cast<double>(det1 + dark1) / t;
    const double r2 = static_cast<double>(both + only2 + dark2) / t;
    const double l1 = live_fraction(r1, s.dead_time);
    const double l2 = live_fraction(r2, s.dead_time);
    const std::uint64_t both_live1 = mc::binomial_sample(rng, both, l1);
    const std::uint64_t both_live = mc::binomial_sample(rng, both_live1, l2);
    const std::uint64_t only1_from_both = both_live1 - both_live;
    const std::uint64_t only2_from_both = mc::binomial_sample(rng, both - both_live1, l2);
    only1 = mc::binomial_sample(rng, only1, l1) + only1_from_both;
    only2 = mc::binomial_sample(rng, only2, l2) + only2_from_both;
    dark1 = mc::binomial_sample(rng, dark1, l1);
    dark2 = mc::binomial_sample(rng, dark2, l2);
    both = both_live;
  }

  raw.n1 = both + only1 + dark1;
  raw.n2 = both + only2 + dark2;
  const double acc_mean =
      static_cast<double>(raw.n1) * static_cast<double>(raw.n2) * s.coincidence_window / t;
  raw.nc = both + mc::poisson_sample(rng, acc_mean);
  raw.accidental = acc_mean;
  return estimate_efficiency(raw, s, target);
}

std::vector<BiasRow> estimator_bias_scan(std::span<const CalibrationScenario> grid,
                                         std::size_t seeds_per_cell) {
  if (grid.empty()) throw std::invalid_argument("estimator_bias_scan: empty grid");
  if (seeds_per_cell == 0) throw std::invalid_argument("estimator_bias_scan: zero seeds");
  std::vector<BiasRow> rows;
  rows.reserve(grid.size());
  for (const auto& cell : grid) {
    BiasRow row;
    row.scenario = cell;
    row.seeds = seeds_per_cell;
    mc::Tally estimates;
    mc::Tally stderrs;
    std::size_t covered = 0;
    for (std::size_t k = 0; k < seeds_per_cell; ++k) {
      CalibrationScenario s = cell;
      s.seed = cell.seed + k;
      try {
        const auto r = simulate_calibration(s);
        estimates.add(r.eta_hat);
        stderrs.add(r.standard_error);
        if (std::fabs(r.eta_hat - cell.eta1) <= 2.0 * r.standard_error) ++covered;
      } catch (const EstimationError&) {
        ++row.failures;
      }
    }
    row.flagged = row.failures == seeds_per_cell;
    if (!row.flagged) {
      row.mean_estimate = estimates.mean();
      row.bias = row.mean_estimate - cell.eta1;
      row.bias_stderr = estimates.standard_error();
      row.mean_stderr = stderrs.mean();
      row.coverage_2sigma =
          static_cast<double>(covered) / static_cast<double>(estimates.count());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace biphoton::calibration
