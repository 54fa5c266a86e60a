#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biphoton/polarization.hpp"

namespace biphoton::double_slit {

/// Double slit illuminated by both photons of a pair.  SI units.
struct SlitGeometry {
  double separation = 100e-6;  ///< center to center
  double width = 10e-6;
  double wavelength = 702e-9;
  double relative_phase = 0.0;  ///< extra phase of slit B, rad

  /// Throws std::invalid_argument unless all lengths are positive and width < separation.
  void validate() const;
};

/// One detector: its distance from the slits, collection aperture (full
/// width, m) and the transverse positions at which it is placed.
struct DetectorPlane {
  double distance = 1.21;
  double aperture = 2e-3;
  std::vector<double> positions;

  void validate() const;
};

enum class Slit { a, b };

/// Throws ModelValidityError if width^2 or separation^2 over lambda * distance
/// is not below 0.1.
void check_fraunhofer(const SlitGeometry& g, double distance);

/// Far-field amplitude at transverse position x of a photon leaving `slit`:
/// sinc(pi w x / (lambda D)) exp(-i k a x / D), a = -s/2 (A) or +s/2 (B).
ComplexAmplitude slit_amplitude(const SlitGeometry& g, Slit slit, double distance, double x);

/// |psi_A(x1) psi_B(x2) + psi_B(x1) psi_A(x2)|^2 at points (no aperture).
/// Both photons never pass the same slit, so those paths carry no amplitude.
double sqm_point_density(const SlitGeometry& g, double d1, double d2, double x1, double x2);

/// Point density averaged over both apertures (16-point Gauss-Legendre each).
/// Unnormalized; consistent with sqm_point_density as apertures shrink.
double sqm_density(const SlitGeometry& g, const DetectorPlane& p1, double x1,
                   const DetectorPlane& p2, double x2);

/// Same-semiplane comparator: sqm_density with the quadrants x1 * x2 > 0 set to 0.
double dbb_density(const SlitGeometry& g, const DetectorPlane& p1, double x1,
                   const DetectorPlane& p2, double x2);

/// Joint coincidence pattern on the grid p1.positions x p2.positions.
/// density holds cell masses normalized to sum to one (row-major, x1
/// major); the marginals are its row and column sums.
struct JointPattern {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> density;
  std::vector<double> marginal1;
  std::vector<double> marginal2;

  double at(std::size_t i, std::size_t j) const { return density.at(i * x2.size() + j); }
};

/// Throws std::invalid_argument when a grid has fewer than two points, is not
/// increasing, or has a step larger than a quarter of that plane's fringe
/// period lambda D / s.
JointPattern sqm_joint_pattern(const SlitGeometry& g, const DetectorPlane& p1,
                               const DetectorPlane& p2);
JointPattern dbb_joint_pattern(const SlitGeometry& g, const DetectorPlane& p1,
                               const DetectorPlane& p2);

/// Fringe period lambda D / s on a plane.
double fringe_period(const SlitGeometry& g, double distance);

/// Single-detector rate at x (aperture-averaged) with the partner detector
/// integrated over [-partner_half_range, partner_half_range] at partner_distance.
/// The range must cover at least six envelope zeros on the partner plane
/// (half range >= 3 lambda D / w); throws std::invalid_argument otherwise.
double sqm_singles_density(const SlitGeometry& g, const DetectorPlane& plane, double x,
                           double partner_distance, double partner_half_range);

/// sqm_singles_density over plane.positions.
std::vector<double> sqm_singles_pattern(const SlitGeometry& g, const DetectorPlane& plane,
                                        double partner_distance, double partner_half_range);

/// Incoherent two-slit sum |psi_A|^2 + |psi_B|^2 over plane.positions (aperture-averaged).
std::vector<double> incoherent_singles(const SlitGeometry& g, const DetectorPlane& plane);

/// (max - min) / (max + min) of singles / incoherent, i.e. the interference
/// contrast left after dividing out the diffraction envelope.
double singles_visibility(std::span<const double> singles, std::span<const double> incoherent);

/// Mean spacing of successive local minima of y(x), located by parabolic
/// interpolation.  Throws EstimationError with fewer than two minima.
double measured_period(std::span<const double> x, std::span<const double> y);

/// Counts with one-sigma uncertainties at detector positions (m).
struct CountData {
  std::vector<double> position;
  std::vector<double> counts;
  std::vector<double> uncertainty;

  void validate() const;
};

struct FitTerms {
  bool background = false;  ///< free constant
  bool slope = false;       ///< free term proportional to position
};

struct ChiSquareResult {
  double chi2 = 0.0;
  int dof = 0;
  double reduced = 0.0;
  std::vector<double> parameters;  ///< [scale], [background], [slope]
};

/// Weighted least-squares fit of scale * model (+ declared nuisance terms)
/// to the counts.  Without a model only the nuisance terms are fitted, so
/// {background, slope} is the straight-line (no interference) fit.
/// Throws std::invalid_argument with fewer than parameters + 2 points and
/// EstimationError for a singular design.
ChiSquareResult chi_square_compare(const CountData& data,
                                   std::optional<std::span<const double>> model,
                                   FitTerms terms);

/// Poisson counts drawn around peak_counts * sqm_density / max over the
/// positions of `mobile` with the partner fixed at fixed_x; uncertainties
/// sqrt(max(counts, 1)).  Reproducible from seed.
CountData synthetic_counts(const SlitGeometry& g, const DetectorPlane& mobile,
                           const DetectorPlane& fixed, double fixed_x, double peak_counts,
                           std::uint64_t seed);

}  // namespace biphoton::double_slit
