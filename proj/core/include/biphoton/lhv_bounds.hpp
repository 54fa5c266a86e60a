#pragma once

#include <string>
#include <string_view>

namespace biphoton::lhv {

/// Parameters of the local-realistic detection-rate bound.  SI units.
struct CasadoParameters {
  double eta = 0.51;             ///< detection efficiency
  double focal_length = 0.009;   ///< F, m
  double crystal_radius = 1e-3;  ///< R_c, active radius of the crystal, m
  double coherence_time = 4.2e-13;  ///< tau, s
  double distance = 0.75;        ///< d, crystal to detector, m
  double wavelength = 711e-9;    ///< lambda, mean detected wavelength, m
  double active_depth = 3e-5;    ///< L, m
  double absorption_time = 1.0;  ///< T, s

  /// Throws std::invalid_argument unless every length and time is positive
  /// and 0 <= eta <= 1.
  void validate() const;
};

struct RateBound {
  double value = 0.0;       ///< counts / s
  bool degenerate = false;  ///< eta == 0, the bound is identically zero
};

/// eta F^2 R_c^2 / (2 L d^2 lambda sqrt(tau T)).
RateBound casado_rate_bound(const CasadoParameters& p);

/// Absorption time at which the bound equals the observed singles rate:
/// T = (eta F^2 R_c^2 / (2 L d^2 lambda R_S))^2 / tau.  The absorption_time
/// field of `p` is ignored.  Throws std::invalid_argument for R_S <= 0 or eta == 0.
double solve_absorption_time(const CasadoParameters& p, double singles_rate);

enum class Verdict { excluded, not_excluded, inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct VerdictOptions {
  double admissible_absorption_time = 10e-9;  ///< s
  double visibility_threshold = 0.9;
};

struct VerdictReport {
  Verdict verdict = Verdict::inconclusive;
  double absorption_time = 0.0;  ///< solved T, s
  double singles_rate = 0.0;
  double visibility = 0.0;
  bool ch_positive = false;
  std::string rationale;
};

/// Excluded iff the solved T exceeds the admissible limit and the data agree
/// with quantum mechanics (CH > 0 or visibility above threshold);
/// not_excluded when T is admissible; inconclusive otherwise.
VerdictReport exclusion_verdict(const CasadoParameters& p, double singles_rate,
                                double visibility, bool ch_positive,
                                const VerdictOptions& options = {});

}  // namespace biphoton::lhv
