#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "biphoton/polarization.hpp"

namespace biphoton::bell {

/// Which Clauser-Horne sum is evaluated.
///
/// substituted: the two single-count terms are replaced by coincidences with
///   no polarization selection on the other arm, N(theta1', inf) and
///   N(inf, theta2); every term then scales with eta1 * eta2.
/// strict: the single-count terms are true singles scaled by their own arm's
///   efficiency only.
enum class ChForm { substituted, strict };

std::string_view to_string(ChForm form) noexcept;

/// Polarizer quality of one arm (angle-independent part of AnalyzerSetting).
struct AnalyzerQuality {
  double eps_par = 1.0;
  double eps_perp = 0.0;

  static constexpr AnalyzerQuality ideal() { return {1.0, 0.0}; }
  AnalyzerSetting at(double theta_deg) const {
    return AnalyzerSetting::lossy(theta_deg, eps_par, eps_perp);
  }
};

using AnalyzerPair = std::array<AnalyzerQuality, 2>;

struct Efficiencies {
  double eta1 = 1.0;
  double eta2 = 1.0;
  void validate() const;
};

/// The four analyzer angles of a CH measurement (degrees) plus the optics.
struct ChConfiguration {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta1p = 0.0;
  double theta2p = 0.0;
  AnalyzerPair analyzers{AnalyzerQuality::ideal(), AnalyzerQuality::ideal()};
  Efficiencies efficiency{};

  /// Throws std::invalid_argument for efficiencies or transmittances out of range.
  void validate() const;
};

/// Signs of the six CH addends, in order:
/// N(t1,t2), N(t1,t2'), N(t1',t2), N(t1',t2'), N(t1',inf), N(inf,t2).
inline constexpr std::array<int, 6> kChSigns{+1, -1, +1, +1, -1, -1};

struct ChResult {
  double value = 0.0;             ///< per emitted pair
  std::array<double, 6> terms{};  ///< unsigned addends, see kChSigns
  ChForm form = ChForm::substituted;
};

ChResult ch_substituted(const BiphotonState& state, const ChConfiguration& config);
ChResult ch_strict(const BiphotonState& state, const ChConfiguration& config);
ChResult ch_evaluate(const BiphotonState& state, const ChConfiguration& config,
                     ChForm form);

struct OptimizerOptions {
  double grid_step_deg = 1.0;     ///< coarse exhaustive grid over (theta2, theta2')
  double angle_tol_deg = 1e-7;    ///< golden-section termination
  double value_tol = 1e-12;       ///< sweep-to-sweep improvement considered stalled
  int max_sweeps = 2000;
};

struct ChOptimum {
  ChConfiguration config;
  ChResult result;
  double coarse_grid_value = 0.0;  ///< best point of the coarse grid
  int sweeps = 0;
};

/// Maximize the CH sum over the four analyzer angles.
///
/// For fixed (theta2, theta2') the objective is an affine function of the
/// arm-1 projector, i.e. a + b cos(2 theta) + c sin(2 theta), so theta1 and
/// theta1' are maximized in closed form.  The remaining pair is searched on an
/// exhaustive grid and refined by coordinate-wise golden-section search.
///
/// Angles are reported canonically: when the maximum is also reached with
/// theta2' = 0 that representative is returned, and for real f the global
/// reflection theta -> -theta is applied so that theta2 lies in [0, 90].
/// Throws ConvergenceError if the refinement does not settle.
ChOptimum ch_optimize(const BiphotonState& state, const Efficiencies& efficiency,
                      const AnalyzerPair& analyzers, ChForm form,
                      const OptimizerOptions& options = {});

/// Canonical representative of an angle set (see ch_optimize).  Only the
/// symmetries valid for `state` are used.
ChConfiguration canonical_angles(const BiphotonState& state, ChConfiguration config);

/// Contour levels drawn on the loophole map.
inline constexpr std::array<double, 5> kLoopholeContours{0.0, 0.01, 0.1, 0.15, 0.2};

/// Maximized strict CH per detected photon over a (f, eta) grid.
///
/// Both arms share efficiency eta and ideal polarizers; the cell value is
/// max_angles CH_strict / (eta * pairs), i.e. CH normalized to the number of
/// detections in one arm.  Its sign is that of CH itself.
struct LoopholeMap {
  std::vector<double> f_axis;
  std::vector<double> eta_axis;
  std::vector<double> ch_over_n;  ///< row-major, f index major
  std::vector<double> contour_levels;

  double at(std::size_t f_index, std::size_t eta_index) const {
    return ch_over_n.at(f_index * eta_axis.size() + eta_index);
  }
};

/// Throws std::invalid_argument unless both grids are nonempty and strictly
/// increasing, with eta in (0, 1].  Cells are independent and are evaluated
/// on up to `threads` worker threads (0 = hardware concurrency); the result
/// does not depend on the thread count.
LoopholeMap loophole_map(std::span<const double> f_grid, std::span<const double> eta_grid,
                         const OptimizerOptions& options = {}, unsigned threads = 0);

/// Maximized strict CH per detection at common efficiency eta, ideal polarizers.
double max_strict_ch_per_detection(const BiphotonState& state, double eta,
                                   const OptimizerOptions& options = {});

/// Efficiency above which the strict CH sum can be positive, found by
/// bisection on max_strict_ch_per_detection.  Requires 0 < |f| <= 1.
double critical_efficiency(const BiphotonState& state, double tolerance = 1e-5,
                           const OptimizerOptions& options = {});

/// Source and acquisition model for converting CH to counts.
struct RateModel {
  double pair_rate = 0.0;        ///< pairs / s at the source
  double background_rate = 0.0;  ///< accidental coincidences / s per term
  double acquisition = 1.0;      ///< s per measurement setting
};

struct ChCounts {
  double rate = 0.0;            ///< CH in coincidences / s
  double standard_error = 0.0;  ///< Poisson, coincidences / s
  std::optional<double> significance;  ///< rate / standard_error; empty if undefined
  std::array<double, 6> term_rates{};
};

/// Substituted-form CH expressed as a count rate with Poisson errors from the
/// six underlying measurements (each acquired for rate_model.acquisition).
ChCounts ch_counts(const BiphotonState& state, const ChConfiguration& config,
                   const RateModel& rate_model);

}  // namespace biphoton::bell
