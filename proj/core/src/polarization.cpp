#include "biphoton/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biphoton/error.hpp"

namespace biphoton {

double reduce_angle(double deg, double period) noexcept {
  double r = std::fmod(deg, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

BiphotonState::BiphotonState(ComplexAmplitude f) : f_(f) {
  if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
    throw std::invalid_argument("BiphotonState: f must be finite");
  }
}

std::array<ComplexAmplitude, 4> BiphotonState::amplitudes() const {
  const double scale = 1.0 / std::sqrt(norm_factor());
  return {ComplexAmplitude(scale), 0.0, 0.0, f_ * scale};
}

void AnalyzerSetting::validate() const {
  const bool in_range = eps_perp >= 0.0 && eps_par <= 1.0 && eps_perp <= eps_par;
  if (!in_range || !std::isfinite(theta_deg)) {
    throw std::invalid_argument(
        "AnalyzerSetting: transmittances must satisfy 0 <= eps_perp <= eps_par <= 1");
  }
}

double AnalyzerSetting::transmission_h() const {
  if (!present) return 1.0;
  const double s = std::sin(deg_to_rad(theta_deg));
  const double c = std::cos(deg_to_rad(theta_deg));
  return eps_par * s * s + eps_perp * c * c;
}

double AnalyzerSetting::transmission_v() const {
  if (!present) return 1.0;
  const double s = std::sin(deg_to_rad(theta_deg));
  const double c = std::cos(deg_to_rad(theta_deg));
  return eps_par * c * c + eps_perp * s * s;
}

void ArmEfficiency::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("ArmEfficiency: eta must lie in [0, 1]");
  }
}

namespace {

// Off-diagonal <H|E|V> of the analyzer POVM element divided by s*c, i.e. the
// contrast e_par - e_perp; zero when no polarization selection is made.
double contrast(const AnalyzerSetting& a) {
  return a.present ? a.eps_par - a.eps_perp : 0.0;
}

double sin_cos(const AnalyzerSetting& a) {
  if (!a.present) return 0.0;
  const double t = deg_to_rad(a.theta_deg);
  return std::sin(t) * std::cos(t);
}

}  // namespace

double coincidence_prob(const BiphotonState& state, const AnalyzerSetting& a1,
                        const AnalyzerSetting& a2) {
  a1.validate();
  a2.validate();
  const ComplexAmplitude f = state.f();
  const double hh = a1.transmission_h() * a2.transmission_h();
  const double vv = std::norm(f) * a1.transmission_v() * a2.transmission_v();
  const double interference =
      2.0 * f.real() * contrast(a1) * contrast(a2) * sin_cos(a1) * sin_cos(a2);
  const double p = (hh + vv + interference) / state.norm_factor();
  return std::clamp(p, 0.0, 1.0);
}

double single_prob(const BiphotonState& state, const AnalyzerSetting& analyzer,
                   Arm arm) {
  const auto open = AnalyzerSetting::absent();
  return arm == Arm::first ? coincidence_prob(state, analyzer, open)
                           : coincidence_prob(state, open, analyzer);
}

double fringe_visibility(const BiphotonState& state, const AnalyzerSetting& fixed,
                         std::size_t resolution,
                         std::optional<AnalyzerSetting> movable) {
  if (resolution < 4) {
    throw std::invalid_argument("fringe_visibility: resolution must be >= 4");
  }
  AnalyzerSetting scan = movable.value_or(fixed);
  scan.present = true;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < resolution; ++i) {
    scan.theta_deg = 180.0 * static_cast<double>(i) / static_cast<double>(resolution);
    const double p = coincidence_prob(state, fixed, scan);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  if (hi + lo <= 0.0) {
    throw EstimationError("fringe_visibility: no coincidences anywhere in the scan");
  }
  return (hi - lo) / (hi + lo);
}

}  // namespace biphoton
