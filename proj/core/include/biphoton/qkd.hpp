#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/polarization.hpp"

namespace biphoton::qkd {

/// Pair entangled in polarization and in emission time:
/// (|s s> + e^{i phi} |l l>)/sqrt(2) (x) (|H H> + f_pol |V V>)/sqrt(1 + |f_pol|^2).
struct DoubleEntangledState {
  double phi = 0.0;  ///< pump interferometer phase, rad
  ComplexAmplitude f_pol{1.0, 0.0};

  void validate() const;
};

/// A projective measurement on one qubit: rows are the bras of outcomes 0 and 1.
struct QubitBasis {
  std::array<std::array<ComplexAmplitude, 2>, 2> vectors;

  /// Linear polarization basis rotated by gamma from (H, V): outcome 0 is
  /// cos(gamma) H + sin(gamma) V.  gamma = 0 is Z, pi/4 is X.
  static QubitBasis polarization(double gamma);
  /// Central-slot time-bin basis (|s> + (-1)^o e^{i alpha} |l>)/sqrt(2).
  static QubitBasis phase(double alpha);
};

/// Local measurement choice: polarizer rotation (rad) and the phase on the
/// long arm of the observer's unbalanced interferometer (rad).
struct ObserverSettings {
  double pol_rotation = 0.0;
  double phase = 0.0;
};

inline constexpr double kZ = 0.0;
inline constexpr double kX = kPi / 4.0;

/// Outcome distribution for both observers.
struct MeasurementDistribution {
  /// Indexed [pol_a][pol_b][phase_a][phase_b], conditional on both photons
  /// arriving in the central time slot.
  std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> joint{};
  double central_slot_per_photon = 0.5;  ///< balanced interferometer, one photon
  double central_slot_joint = 0.25;      ///< both photons central

  double at(int pol_a, int pol_b, int phase_a, int phase_b) const {
    return joint[pol_a][pol_b][phase_a][phase_b];
  }
};

MeasurementDistribution measurement_distribution(const DoubleEntangledState& state,
                                                 const ObserverSettings& alice,
                                                 const ObserverSettings& bob);

/// Two-outcome joint |<u_a (x) v_b | psi>|^2 of one degree of freedom.
using QubitPairState = std::array<ComplexAmplitude, 4>;  ///< |00>, |01>, |10>, |11>
QubitPairState polarization_pair(ComplexAmplitude f);
QubitPairState time_bin_pair(double phi);
std::array<double, 4> joint_probabilities(const QubitPairState& psi, const QubitBasis& a,
                                          const QubitBasis& b);

enum class ChannelKind { single_entangled, double_entangled };
enum class EveKind { none, fixed_basis, breidbart };
enum class EveTarget { polarization, phase, both };

std::string_view to_string(ChannelKind k) noexcept;
std::string_view to_string(EveKind k) noexcept;
std::string_view to_string(EveTarget t) noexcept;

struct EveStrategy {
  EveKind kind = EveKind::none;
  double intercept_fraction = 1.0;  ///< eta_E
  EveTarget target = EveTarget::both;

  void validate() const;
};

/// The two settings each observer chooses from, per degree of freedom.
struct ProtocolSettings {
  std::array<double, 2> alice_pol{kZ, kX};
  std::array<double, 2> bob_pol{kZ, kX};
  std::array<double, 2> alice_phase{0.0, kPi / 2.0};
  std::array<double, 2> bob_phase{0.0, -kPi / 2.0};
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct GuessReport {
  double with_side_information = 0.0;
  double prior = 0.0;
  Estimate advantage;
};

struct ChannelReport {
  ChannelKind channel = ChannelKind::double_entangled;
  EveStrategy eve;
  std::uint64_t rounds = 0;
  std::uint64_t post_selected = 0;  ///< both photons in the central slot
  std::uint64_t sifted = 0;
  std::uint64_t attacked = 0;       ///< sifted rounds Eve intercepted
  bool empty_sift = false;
  Estimate sifted_rate;             ///< sifted / post_selected
  Estimate qber;                    ///< per key bit
  Estimate symbol_error_rate;       ///< sifted symbols with any wrong bit
  Estimate mi_symbol;               ///< I(Alice symbol; Eve record, bases), bits
  Estimate mi_polarization;         ///< per-qubit, polarization bit
  std::optional<Estimate> mi_phase; ///< per-qubit, phase bit (double channel)
  Estimate p_full_symbol;           ///< Eve's record fixes the whole symbol
  GuessReport guess;
  bool keys_identical = false;
  std::size_t key_bits() const { return channel == ChannelKind::double_entangled ? 2 : 1; }
};

/// One protocol round, as written to the transcript.  -1 marks "none".
struct RoundRecord {
  std::uint64_t round = 0;
  int alice_pol_basis = 0;
  int alice_phase_setting = 0;
  int bob_pol_basis = 0;
  int bob_phase_setting = 0;
  bool central = true;
  bool eve_attacked = false;
  int eve_pol = -1;
  int eve_phase = -1;
  int alice_pol = -1;
  int alice_phase = -1;
  int bob_pol = -1;
  int bob_phase = -1;
  bool sifted = false;
};

struct ProtocolRun {
  ChannelReport report;
  std::vector<std::uint8_t> alice_key;  ///< sifted symbols
  std::vector<std::uint8_t> bob_key;
};

/// Simulate n_rounds independent rounds.  Round r draws from
/// RngStream(seed, r, domain::qkd), so results are reproducible and do not
/// depend on batching.  The single-entangled channel uses polarization only
/// and has no time-slot post-selection.  Throws std::invalid_argument for
/// n_rounds == 0 or an Eve targeting the phase of a single channel.
ProtocolRun run_protocol(const DoubleEntangledState& state, ChannelKind channel,
                         std::uint64_t n_rounds, const EveStrategy& eve, std::uint64_t seed,
                         const ProtocolSettings& settings = {},
                         std::vector<RoundRecord>* transcript = nullptr);

/// Polarization-only baseline with a maximally entangled pair.
ProtocolRun single_channel_baseline(std::uint64_t n_rounds, const EveStrategy& eve,
                                    std::uint64_t seed, const ProtocolSettings& settings = {});

/// run_protocol at each intercept fraction, seeds seed, seed + 1, ...
std::vector<ChannelReport> eve_sweep(const DoubleEntangledState& state, ChannelKind channel,
                                     EveKind kind, EveTarget target,
                                     std::span<const double> fractions, std::uint64_t n_rounds,
                                     std::uint64_t seed, const ProtocolSettings& settings = {});

/// Eve-information measure used to equalize the two channels.
enum class InformationMetric {
  mutual_information,     ///< I(Alice; Eve) per key bit
  full_symbol_guess,      ///< advantage of Eve's best guess of the whole symbol
  full_symbol_certainty,  ///< fraction of symbols Eve knows with certainty
};
std::string_view to_string(InformationMetric m) noexcept;

Estimate information_metric(const ChannelReport& report, InformationMetric metric);

struct DisturbanceResult {
  EveKind kind = EveKind::fixed_basis;
  InformationMetric metric = InformationMetric::mutual_information;
  double target = 0.0;
  bool reachable = false;
  std::string note;
  double eta_single = 0.0;
  double eta_double = 0.0;
  Estimate metric_single_full;  ///< metric at eta_E = 1
  Estimate metric_double_full;
  Estimate error_single;        ///< symbol error rate at the solved eta_E
  Estimate error_double;
  Estimate ratio;               ///< error_double / error_single
  double significance = 0.0;    ///< (ratio - 1) / stderr
  double reference_ratio = 0.0; ///< nominal factor for this Eve kind
};

/// Equalize Eve's information on the two channels and compare the induced
/// symbol error rates.  Both metric and error rate are linear in eta_E, so
/// eta_E = target / metric(eta_E = 1); the channels are then re-simulated at
/// their solved eta_E with fresh seeds.  Unreachable targets (metric at
/// eta_E = 1 below target) are reported with reachable = false.
DisturbanceResult disturbance_ratio(EveKind kind, InformationMetric metric, double target,
                                    std::uint64_t n_rounds, std::uint64_t seed,
                                    const ProtocolSettings& settings = {});

}  // namespace biphoton::qkd
