#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>

namespace biphoton {

using ComplexAmplitude = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Reduce an angle in degrees to [0, period).
double reduce_angle(double deg, double period = 180.0) noexcept;

/// Two-photon polarization state (|H>|H> + f |V>|V>) / sqrt(1 + |f|^2).
///
/// f = 1 is the maximally entangled state, f = 0 the product |H>|H>.
class BiphotonState {
 public:
  /// Throws std::invalid_argument if f is not finite.
  explicit BiphotonState(ComplexAmplitude f);

  static BiphotonState maximally_entangled() { return BiphotonState(1.0); }
  static BiphotonState product() { return BiphotonState(0.0); }

  ComplexAmplitude f() const noexcept { return f_; }
  /// 1 + |f|^2, the inverse of the squared normalization.
  double norm_factor() const noexcept { return 1.0 + std::norm(f_); }

  /// Normalized amplitudes in the basis HH, HV, VH, VV.
  std::array<ComplexAmplitude, 4> amplitudes() const;

 private:
  ComplexAmplitude f_;
};

/// Polarizer on one arm.
///
/// theta_deg is measured from the vertical axis, so an H photon is
/// transmitted with sin^2(theta) by an ideal polarizer.  eps_par (eps_perp) is
/// the transmittance for light polarized along (normal to) the axis.  An
/// absent analyzer (no polarization selection) transmits everything.
struct AnalyzerSetting {
  double theta_deg = 0.0;
  double eps_par = 1.0;
  double eps_perp = 0.0;
  bool present = true;

  static AnalyzerSetting ideal(double theta_deg) { return {theta_deg, 1.0, 0.0, true}; }
  static AnalyzerSetting absent() { return {0.0, 1.0, 1.0, false}; }
  static AnalyzerSetting lossy(double theta_deg, double eps_par, double eps_perp) {
    return {theta_deg, eps_par, eps_perp, true};
  }

  /// Throws std::invalid_argument unless 0 <= eps_perp <= eps_par <= 1.
  void validate() const;

  /// Probability that an H (resp. V) photon passes.
  double transmission_h() const;
  double transmission_v() const;
};

/// Detection efficiency of one arm, in [0, 1].
struct ArmEfficiency {
  double eta = 1.0;
  void validate() const;
};

enum class Arm { first, second };

/// Coincidence probability per emitted pair for the two analyzer settings.
///
///   N = [ T1h T2h + |f|^2 T1v T2v
///         + (f + f*) (e1par - e1perp)(e2par - e2perp) s1 c1 s2 c2 ] / (1 + |f|^2)
///
/// with Tih = e_par sin^2 + e_perp cos^2 and Tiv = e_par cos^2 + e_perp sin^2.
/// With ideal polarizers this is |s1 s2 + f c1 c2|^2 / (1 + |f|^2).
/// An absent analyzer is treated as unit transmittance on both axes.
double coincidence_prob(const BiphotonState& state, const AnalyzerSetting& a1,
                        const AnalyzerSetting& a2);

/// Single-arm detection probability with no selection on the other arm.
double single_prob(const BiphotonState& state, const AnalyzerSetting& analyzer,
                   Arm arm = Arm::first);

inline constexpr std::size_t kDefaultVisibilityResolution = 720;

/// Fringe visibility (Nmax - Nmin) / (Nmax + Nmin) obtained by holding the
/// first arm at `fixed` and scanning the second analyzer over [0, 180)
/// degrees in `resolution` steps.  The scanned analyzer uses `movable`'s
/// transmittances, or `fixed`'s when not given.
///
/// Throws std::invalid_argument for resolution < 4 and EstimationError when
/// the scan never produces a coincidence.
double fringe_visibility(const BiphotonState& state, const AnalyzerSetting& fixed,
                         std::size_t resolution = kDefaultVisibilityResolution,
                         std::optional<AnalyzerSetting> movable = std::nullopt);

}  // namespace biphoton
