#include "biphoton/qkd.hpp"

#include <cmath>
#include <stdexcept>

#include "biphoton/error.hpp"
#include "biphoton/mc/information.hpp"
#include "biphoton/mc/rng.hpp"
#include "biphoton/mc/sampling.hpp"

namespace biphoton::qkd {

void DoubleEntangledState::validate() const {
  if (!std::isfinite(phi) || !std::isfinite(f_pol.real()) || !std::isfinite(f_pol.imag())) {
    throw std::invalid_argument("DoubleEntangledState: non-finite parameter");
  }
}

QubitBasis QubitBasis::polarization(double gamma) {
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  return {{{{c, s}, {-s, c}}}};
}

QubitBasis QubitBasis::phase(double alpha) {
  const double r = 1.0 / std::sqrt(2.0);
  const ComplexAmplitude e = std::polar(r, alpha);
  return {{{{r, e}, {r, -e}}}};
}

QubitPairState polarization_pair(ComplexAmplitude f) {
  const double n = 1.0 / std::sqrt(1.0 + std::norm(f));
  return {n, 0.0, 0.0, f * n};
}

QubitPairState time_bin_pair(double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r, 0.0, 0.0, std::polar(r, phi)};
}

std::array<double, 4> joint_probabilities(const QubitPairState& psi, const QubitBasis& a,
                                          const QubitBasis& b) {
  std::array<double, 4> p{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      ComplexAmplitude amp = 0.0;
      for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
          amp += std::conj(a.vectors[i][u]) * std::conj(b.vectors[j][v]) * psi[2 * u + v];
        }
      }
      p[2 * i + j] = std::norm(amp);
    }
  }
  return p;
}

MeasurementDistribution measurement_distribution(const DoubleEntangledState& state,
                                                 const ObserverSettings& alice,
                                                 const ObserverSettings& bob) {
  state.validate();
  const auto pol = joint_probabilities(polarization_pair(state.f_pol),
                                       QubitBasis::polarization(alice.pol_rotation),
                                       QubitBasis::polarization(bob.pol_rotation));
  const auto ph = joint_probabilities(time_bin_pair(state.phi), QubitBasis::phase(alice.phase),
                                      QubitBasis::phase(bob.phase));
  MeasurementDistribution d;
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb)
      for (int ta = 0; ta < 2; ++ta)
        for (int tb = 0; tb < 2; ++tb) d.joint[pa][pb][ta][tb] = pol[2 * pa + pb] * ph[2 * ta + tb];
  return d;
}

std::string_view to_string(ChannelKind k) noexcept {
  return k == ChannelKind::single_entangled ? "single" : "double";
}

std::string_view to_string(EveKind k) noexcept {
  switch (k) {
    case EveKind::none: return "none";
    case EveKind::fixed_basis: return "fixed";
    case EveKind::breidbart: return "breidbart";
  }
  return "none";
}

std::string_view to_string(EveTarget t) noexcept {
  switch (t) {
    case EveTarget::polarization: return "polarization";
    case EveTarget::phase: return "phase";
    case EveTarget::both: return "both";
  }
  return "both";
}

std::string_view to_string(InformationMetric m) noexcept {
  switch (m) {
    case InformationMetric::mutual_information: return "mutual_information";
    case InformationMetric::full_symbol_guess: return "full_symbol_guess";
    case InformationMetric::full_symbol_certainty: return "full_symbol_certainty";
  }
  return "mutual_information";
}

void EveStrategy::validate() const {
  if (!(intercept_fraction >= 0.0 && intercept_fraction <= 1.0)) {
    throw std::invalid_argument("EveStrategy: intercept fraction must lie in [0, 1]");
  }
}

namespace {

double overlap(const std::array<ComplexAmplitude, 2>& bra, const std::array<ComplexAmplitude, 2>& ket) {
  return std::norm(std::conj(bra[0]) * ket[0] + std::conj(bra[1]) * ket[1]);
}

// Precomputed outcome laws of one degree of freedom for every setting pair.
struct DofModel {
  std::array<std::array<std::array<double, 4>, 2>, 2> direct{};  // [alice][bob] -> p(a, b)
  std::array<std::array<double, 4>, 2> with_eve{};               // [alice] -> p(a, e)
  std::array<std::array<double, 2>, 2> resend{};                 // [bob][e] -> p(b = 0 | e)
  std::array<bool, 2> flip{};                                    // Bob inverts his bit

  DofModel(const QubitPairState& psi, std::array<QubitBasis, 2> alice,
           std::array<QubitBasis, 2> bob, const QubitBasis& eve) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) direct[i][j] = joint_probabilities(psi, alice[i], bob[j]);
      with_eve[i] = joint_probabilities(psi, alice[i], eve);
      for (int e = 0; e < 2; ++e) resend[i][e] = overlap(bob[i].vectors[0], eve.vectors[e]);
      const auto& m = direct[i][i];
      flip[i] = (m[0] + m[3]) - (m[1] + m[2]) < 0.0;
    }
  }

  struct Outcome {
    int alice, bob, eve;
  };

  Outcome sample(mc::RngStream& rng, int a_idx, int b_idx, bool attacked) const {
    Outcome o{};
    if (attacked) {
      const auto k = mc::categorical_sample(rng, with_eve[a_idx]);
      o.alice = static_cast<int>(k / 2);
      o.eve = static_cast<int>(k % 2);
      o.bob = rng.bernoulli(resend[b_idx][o.eve]) ? 0 : 1;
    } else {
      const auto k = mc::categorical_sample(rng, direct[a_idx][b_idx]);
      o.alice = static_cast<int>(k / 2);
      o.bob = static_cast<int>(k % 2);
      o.eve = -1;
    }
    if (flip[b_idx]) o.bob ^= 1;
    return o;
  }
};

QubitBasis eve_basis(EveKind kind, const std::array<double, 2>& bob, bool polarization) {
  const double angle = kind == EveKind::breidbart ? 0.5 * (bob[0] + bob[1]) : bob[0];
  return polarization ? QubitBasis::polarization(angle) : QubitBasis::phase(angle);
}

std::array<QubitBasis, 2> pol_bases(const std::array<double, 2>& g) {
  return {QubitBasis::polarization(g[0]), QubitBasis::polarization(g[1])};
}

std::array<QubitBasis, 2> phase_bases(const std::array<double, 2>& a) {
  return {QubitBasis::phase(a[0]), QubitBasis::phase(a[1])};
}

Estimate proportion(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

Estimate information(const mc::ContingencyTable& t) {
  const auto e = mc::mutual_information_estimate(t);
  return {e.bits, e.standard_error};
}

int record(int eve_outcome) { return eve_outcome < 0 ? 2 : eve_outcome; }

}  // namespace

ProtocolRun run_protocol(const DoubleEntangledState& state, ChannelKind channel,
                         std::uint64_t n_rounds, const EveStrategy& eve, std::uint64_t seed,
                         const ProtocolSettings& settings, std::vector<RoundRecord>* transcript) {
  state.validate();
  eve.validate();
  if (n_rounds == 0) throw std::invalid_argument("run_protocol: n_rounds must be >= 1");
  const bool two = channel == ChannelKind::double_entangled;
  const bool eve_on = eve.kind != EveKind::none && eve.intercept_fraction > 0.0;
  if (!two && eve.kind != EveKind::none && eve.target == EveTarget::phase) {
    throw std::invalid_argument("run_protocol: the single channel carries no phase bit");
  }
  const bool eve_pol = eve_on && eve.target != EveTarget::phase;
  const bool eve_phase = eve_on && two && eve.target != EveTarget::polarization;

  const DofModel pol(polarization_pair(state.f_pol), pol_bases(settings.alice_pol),
                     pol_bases(settings.bob_pol), eve_basis(eve.kind, settings.bob_pol, true));
  const DofModel phase(time_bin_pair(state.phi), phase_bases(settings.alice_phase),
                       phase_bases(settings.bob_phase),
                       eve_basis(eve.kind, settings.bob_phase, false));
  const MeasurementDistribution slots{};

  const std::size_t bits = two ? 2 : 1;
  mc::ContingencyTable symbol_table(std::size_t{1} << bits, two ? 36 : 6);
  mc::ContingencyTable pol_table(2, 6);
  mc::ContingencyTable phase_table(2, 6);

  ProtocolRun run;
  ChannelReport& rep = run.report;
  rep.channel = channel;
  rep.eve = eve;
  rep.rounds = n_rounds;
  std::uint64_t bit_errors = 0;
  std::uint64_t symbol_errors = 0;
  if (transcript) transcript->clear();

  for (std::uint64_t r = 0; r < n_rounds; ++r) {
    mc::RngStream rng(seed, r, mc::domain::qkd);
    RoundRecord rec;
    rec.round = r;
    rec.alice_pol_basis = static_cast<int>(rng.below(2));
    rec.bob_pol_basis = static_cast<int>(rng.below(2));
    if (two) {
      rec.alice_phase_setting = static_cast<int>(rng.below(2));
      rec.bob_phase_setting = static_cast<int>(rng.below(2));
      rec.central = rng.bernoulli(slots.central_slot_joint);
    }
    rec.eve_attacked = eve_on && rng.bernoulli(eve.intercept_fraction);

    if (rec.central) {
      ++rep.post_selected;
      const auto p = pol.sample(rng, rec.alice_pol_basis, rec.bob_pol_basis,
                                rec.eve_attacked && eve_pol);
      rec.alice_pol = p.alice;
      rec.bob_pol = p.bob;
      rec.eve_pol = p.eve;
      int rec_phase = 2;
      if (two) {
        const auto t = phase.sample(rng, rec.alice_phase_setting, rec.bob_phase_setting,
                                    rec.eve_attacked && eve_phase);
        rec.alice_phase = t.alice;
        rec.bob_phase = t.bob;
        rec.eve_phase = t.eve;
        rec_phase = record(t.eve);
      }
      rec.sifted = rec.alice_pol_basis == rec.bob_pol_basis &&
                   (!two || rec.alice_phase_setting == rec.bob_phase_setting);

      if (rec.sifted) {
        ++rep.sifted;
        if (rec.eve_attacked) ++rep.attacked;
        const int e_pol = rec.alice_pol != rec.bob_pol;
        const int e_ph = two && rec.alice_phase != rec.bob_phase;
        bit_errors += static_cast<std::uint64_t>(e_pol + e_ph);
        symbol_errors += (e_pol || e_ph) ? 1 : 0;

        const auto a_sym = static_cast<std::uint8_t>(rec.alice_pol | (two ? rec.alice_phase << 1 : 0));
        const auto b_sym = static_cast<std::uint8_t>(rec.bob_pol | (two ? rec.bob_phase << 1 : 0));
        run.alice_key.push_back(a_sym);
        run.bob_key.push_back(b_sym);

        const std::size_t pol_col = static_cast<std::size_t>(record(rec.eve_pol) * 2 + rec.alice_pol_basis);
        pol_table.add(static_cast<std::size_t>(rec.alice_pol), pol_col);
        std::size_t sym_col = pol_col;
        if (two) {
          const std::size_t ph_col = static_cast<std::size_t>(rec_phase * 2 + rec.alice_phase_setting);
          phase_table.add(static_cast<std::size_t>(rec.alice_phase), ph_col);
          sym_col = pol_col * 6 + ph_col;
        }
        symbol_table.add(a_sym, sym_col);
      }
    }
    if (transcript) transcript->push_back(rec);
  }

  rep.sifted_rate = proportion(rep.sifted, rep.post_selected);
  rep.keys_identical = run.alice_key == run.bob_key;
  rep.empty_sift = rep.sifted == 0;
  if (rep.empty_sift) return run;

  const auto n = static_cast<double>(rep.sifted);
  rep.qber = proportion(bit_errors, rep.sifted * bits);
  rep.symbol_error_rate = proportion(symbol_errors, rep.sifted);
  rep.mi_symbol = information(symbol_table);
  rep.mi_polarization = information(pol_table);
  if (two) rep.mi_phase = information(phase_table);
  const double certain = mc::certainty_fraction(symbol_table);
  rep.p_full_symbol = {certain, std::sqrt(certain * (1.0 - certain) / n)};
  const auto g = mc::guessing_probability(symbol_table);
  rep.guess.with_side_information = g.with_side_information;
  rep.guess.prior = g.prior;
  rep.guess.advantage.value = g.advantage();
  if (g.prior < 1.0) {
    const double pg = g.with_side_information;
    rep.guess.advantage.standard_error = std::sqrt(pg * (1.0 - pg) / n) / (1.0 - g.prior);
  }
  return run;
}

ProtocolRun single_channel_baseline(std::uint64_t n_rounds, const EveStrategy& eve,
                                    std::uint64_t seed, const ProtocolSettings& settings) {
  return run_protocol(DoubleEntangledState{}, ChannelKind::single_entangled, n_rounds, eve, seed,
                      settings);
}

std::vector<ChannelReport> eve_sweep(const DoubleEntangledState& state, ChannelKind channel,
                                     EveKind kind, EveTarget target,
                                     std::span<const double> fractions, std::uint64_t n_rounds,
                                     std::uint64_t seed, const ProtocolSettings& settings) {
  if (fractions.empty()) throw std::invalid_argument("eve_sweep: no intercept fractions");
  std::vector<ChannelReport> out;
  out.reserve(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const EveStrategy eve{kind, fractions[i], target};
    out.push_back(run_protocol(state, channel, n_rounds, eve, seed + i, settings).report);
  }
  return out;
}

Estimate information_metric(const ChannelReport& report, InformationMetric metric) {
  switch (metric) {
    case InformationMetric::mutual_information: {
      const double k = static_cast<double>(report.key_bits());
      return {report.mi_symbol.value / k, report.mi_symbol.standard_error / k};
    }
    case InformationMetric::full_symbol_guess: return report.guess.advantage;
    case InformationMetric::full_symbol_certainty: return report.p_full_symbol;
  }
  return {};
}

DisturbanceResult disturbance_ratio(EveKind kind, InformationMetric metric, double target,
                                    std::uint64_t n_rounds, std::uint64_t seed,
                                    const ProtocolSettings& settings) {
  if (kind == EveKind::none) throw std::invalid_argument("disturbance_ratio: Eve is required");
  if (!(target > 0.0)) throw std::invalid_argument("disturbance_ratio: target must be positive");
  if (n_rounds == 0) throw std::invalid_argument("disturbance_ratio: n_rounds must be >= 1");

  DisturbanceResult out;
  out.kind = kind;
  out.metric = metric;
  out.target = target;
  out.reference_ratio = kind == EveKind::breidbart ? 19.0 / 6.0 : 3.0;

  // The double channel keeps a quarter of its rounds after post-selection.
  const std::uint64_t double_rounds = 4 * n_rounds;
  const DoubleEntangledState state{};
  auto single = [&](double eta, std::uint64_t s) {
    return run_protocol(state, ChannelKind::single_entangled, n_rounds,
                        {kind, eta, EveTarget::polarization}, s, settings).report;
  };
  auto dbl = [&](double eta, std::uint64_t s) {
    return run_protocol(state, ChannelKind::double_entangled, double_rounds,
                        {kind, eta, EveTarget::both}, s, settings).report;
  };

  out.metric_single_full = information_metric(single(1.0, seed), metric);
  out.metric_double_full = information_metric(dbl(1.0, seed + 1), metric);
  const double ms = out.metric_single_full.value;
  const double md = out.metric_double_full.value;
  const auto unreachable = [&](double m) { return !(m > 0.0) || target > m; };
  if (unreachable(ms) || unreachable(md)) {
    out.note = "target not reachable at eta_E <= 1 on " +
               std::string(unreachable(md) ? "the double" : "the single") + " channel";
    return out;
  }
  out.reachable = true;
  out.eta_single = target / ms;
  out.eta_double = target / md;
  out.error_single = single(out.eta_single, seed + 2).symbol_error_rate;
  out.error_double = dbl(out.eta_double, seed + 3).symbol_error_rate;
  if (!(out.error_single.value > 0.0)) {
    out.note = "no errors induced on the single channel";
    out.reachable = false;
    return out;
  }
  const auto rel2 = [](const Estimate& e) {
    return e.value > 0.0 ? std::pow(e.standard_error / e.value, 2) : 0.0;
  };
  out.ratio.value = out.error_double.value / out.error_single.value;
  out.ratio.standard_error =
      out.ratio.value * std::sqrt(rel2(out.error_single) + rel2(out.error_double) +
                                  rel2(out.metric_single_full) + rel2(out.metric_double_full));
  out.significance = out.ratio.standard_error > 0.0
                         ? (out.ratio.value - 1.0) / out.ratio.standard_error
                         : 0.0;
  return out;
}

}  // namespace biphoton::qkd
