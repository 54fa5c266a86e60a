#include "biphoton/lhv_bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace biphoton::lhv {

void CasadoParameters::validate() const {
  for (double v : {focal_length, crystal_radius, coherence_time, distance, wavelength,
                   active_depth, absorption_time}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("CasadoParameters: lengths and times must be positive");
    }
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("CasadoParameters: eta must lie in [0, 1]");
  }
}

namespace {

// Bound multiplied by sqrt(tau T).
double prefactor(const CasadoParameters& p) {
  const double num = p.eta * p.focal_length * p.focal_length * p.crystal_radius *
                     p.crystal_radius;
  const double den = 2.0 * p.active_depth * p.distance * p.distance * p.wavelength;
  return num / den;
}

}  // namespace

RateBound casado_rate_bound(const CasadoParameters& p) {
  p.validate();
  if (p.eta == 0.0) return {0.0, true};
  return {prefactor(p) / std::sqrt(p.coherence_time * p.absorption_time), false};
}

double solve_absorption_time(const CasadoParameters& p, double singles_rate) {
  p.validate();
  if (!(singles_rate > 0.0) || !std::isfinite(singles_rate)) {
    throw std::invalid_argument("solve_absorption_time: singles rate must be positive");
  }
  if (p.eta == 0.0) {
    throw std::invalid_argument("solve_absorption_time: eta == 0 admits no solution");
  }
  const double r = prefactor(p) / singles_rate;
  return r * r / p.coherence_time;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::excluded: return "excluded";
    case Verdict::not_excluded: return "not_excluded";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

VerdictReport exclusion_verdict(const CasadoParameters& p, double singles_rate,
                                double visibility, bool ch_positive,
                                const VerdictOptions& options) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("exclusion_verdict: visibility must lie in [0, 1]");
  }
  if (!(options.admissible_absorption_time > 0.0)) {
    throw std::invalid_argument("exclusion_verdict: admissible T must be positive");
  }
  VerdictReport r;
  r.singles_rate = singles_rate;
  r.visibility = visibility;
  r.ch_positive = ch_positive;
  r.absorption_time = solve_absorption_time(p, singles_rate);

  std::ostringstream why;
  why.precision(4);
  const bool t_large = r.absorption_time > options.admissible_absorption_time;
  const bool high_v = visibility > options.visibility_threshold;
  if (!t_large) {
    r.verdict = Verdict::not_excluded;
    why << "T = " << r.absorption_time << " s is within the admissible "
        << options.admissible_absorption_time << " s";
  } else if (ch_positive || high_v) {
    r.verdict = Verdict::excluded;
    why << "T = " << r.absorption_time << " s exceeds " << options.admissible_absorption_time
        << " s and";
    if (ch_positive) why << " CH > 0";
    if (ch_positive && high_v) why << " and";
    if (high_v) why << " V = " << visibility << " > " << options.visibility_threshold;
  } else {
    r.verdict = Verdict::inconclusive;
    why << "T = " << r.absorption_time << " s exceeds " << options.admissible_absorption_time
        << " s but CH <= 0 and V = " << visibility << " <= " << options.visibility_threshold;
  }
  r.rationale = why.str();
  return r;
}

}  // namespace biphoton::lhv
