#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "biphoton/qkd.hpp"

using namespace biphoton;
using namespace biphoton::qkd;

namespace {

using cd = std::complex<double>;

// Explicit model of the two unbalanced Mach-Zehnder analyzers: each photon
// is emitted early (e = 0) or late (e = 1), takes the short or long arm
// (amplitude 1/sqrt2 each, long arm delayed by one slot and phase-shifted),
// and exits port o of the recombining splitter with sign (-1)^o on the long
// arm.  Returns the probability of each outcome with both photons in the
// central slot, and that slot's joint probability.
struct MzOracle {
  double joint[2][2][2][2]{};
  double central_joint = 0.0;
  double central_a = 0.0;
};

cd arm_amplitude(int emission, int slot, int port, double alpha) {
  if (slot == emission) return 0.5;                                         // short arm
  if (slot == emission + 1) return 0.5 * (port ? -1.0 : 1.0) * std::polar(1.0, alpha);  // long arm
  return 0.0;
}

cd pol_projection(int outcome, double gamma, int pol) {
  const double c = std::cos(gamma), s = std::sin(gamma);
  if (outcome == 0) return pol == 0 ? c : s;
  return pol == 0 ? -s : c;
}

MzOracle mz_oracle(const DoubleEntangledState& st, const ObserverSettings& a,
                   const ObserverSettings& b) {
  const double pol_norm = std::sqrt(1.0 + std::norm(st.f_pol));
  const cd g[2] = {1.0 / pol_norm, st.f_pol / pol_norm};
  const cd c[2] = {1.0 / std::sqrt(2.0), std::polar(1.0, st.phi) / std::sqrt(2.0)};
  MzOracle out;
  double total_a_central = 0.0;
  for (int sa = 0; sa < 3; ++sa)
    for (int sb = 0; sb < 3; ++sb)
      for (int oa = 0; oa < 2; ++oa)
        for (int ob = 0; ob < 2; ++ob)
          for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
              cd amp = 0.0;
              for (int e = 0; e < 2; ++e)
                for (int p = 0; p < 2; ++p)
                  amp += c[e] * g[p] * pol_projection(pa, a.pol_rotation, p) *
                         pol_projection(pb, b.pol_rotation, p) *
                         arm_amplitude(e, sa, oa, a.phase) * arm_amplitude(e, sb, ob, b.phase);
              const double prob = std::norm(amp);
              if (sa == 1) total_a_central += prob;
              if (sa == 1 && sb == 1) {
                out.joint[pa][pb][oa][ob] = prob;
                out.central_joint += prob;
              }
            }
  for (auto& x : out.joint)
    for (auto& y : x)
      for (auto& z : y)
        for (auto& w : z) w /= out.central_joint;
  out.central_a = total_a_central;
  return out;
}

}  // namespace

TEST(MeasurementDistribution, MatchesInterferometerOracle) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi), amp(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const DoubleEntangledState st{ang(gen), {amp(gen), i % 2 ? amp(gen) : 0.0}};
    const ObserverSettings a{ang(gen), ang(gen)}, b{ang(gen), ang(gen)};
    const auto d = measurement_distribution(st, a, b);
    const auto o = mz_oracle(st, a, b);
    EXPECT_NEAR(d.central_slot_joint, o.central_joint, 1e-12);
    EXPECT_NEAR(d.central_slot_per_photon, o.central_a, 1e-12);
    for (int pa = 0; pa < 2; ++pa)
      for (int pb = 0; pb < 2; ++pb)
        for (int ta = 0; ta < 2; ++ta)
          for (int tb = 0; tb < 2; ++tb)
            worst = std::max(worst, std::fabs(d.at(pa, pb, ta, tb) - o.joint[pa][pb][ta][tb]));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(MeasurementDistribution, NormalizedAndNoSignaling) {
  const DoubleEntangledState st{0.3, {0.6, 0.2}};
  const ObserverSettings a{0.4, 1.1};
  auto alice_marginal = [&](const ObserverSettings& b) {
    const auto d = measurement_distribution(st, a, b);
    std::array<double, 4> m{};
    double total = 0.0;
    for (int pa = 0; pa < 2; ++pa)
      for (int pb = 0; pb < 2; ++pb)
        for (int ta = 0; ta < 2; ++ta)
          for (int tb = 0; tb < 2; ++tb) {
            m[2 * pa + ta] += d.at(pa, pb, ta, tb);
            total += d.at(pa, pb, ta, tb);
          }
    EXPECT_NEAR(total, 1.0, 1e-14);
    return m;
  };
  const auto m1 = alice_marginal({0.0, 0.0});
  const auto m2 = alice_marginal({kX, -kPi / 2});
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(m1[k], m2[k], 1e-14);
}

TEST(MeasurementDistribution, FactorizesIntoDegreesOfFreedom) {
  const DoubleEntangledState st{1.0, {0.8, 0.0}};
  const ObserverSettings a{0.2, 0.5}, b{1.3, -0.4};
  const auto d = measurement_distribution(st, a, b);
  const auto pol = joint_probabilities(polarization_pair(st.f_pol), QubitBasis::polarization(0.2),
                                       QubitBasis::polarization(1.3));
  const auto ph = joint_probabilities(time_bin_pair(st.phi), QubitBasis::phase(0.5),
                                      QubitBasis::phase(-0.4));
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb)
      for (int ta = 0; ta < 2; ++ta)
        for (int tb = 0; tb < 2; ++tb)
          EXPECT_NEAR(d.at(pa, pb, ta, tb), pol[2 * pa + pb] * ph[2 * ta + tb], 1e-15);
}

TEST(MeasurementDistribution, MatchedSettingsArePerfectlyCorrelated) {
  const DoubleEntangledState st{};
  for (double gamma : {kZ, kX}) {
    const auto d = measurement_distribution(st, {gamma, 0.0}, {gamma, 0.0});
    EXPECT_NEAR(d.at(0, 0, 0, 0) + d.at(1, 1, 0, 0) + d.at(0, 0, 1, 1) + d.at(1, 1, 1, 1), 1.0,
                1e-14);
  }
  // Phase correlation requires alpha + beta = phi.
  const auto d = measurement_distribution(st, {0.0, kPi / 2}, {0.0, -kPi / 2});
  EXPECT_NEAR(d.at(0, 0, 0, 0) + d.at(0, 0, 1, 1), 0.5, 1e-14);
}

TEST(Protocol, NoEavesdropperBaseline) {
  const auto run = run_protocol({}, ChannelKind::double_entangled, 100000, {}, 7);
  const auto& r = run.report;
  EXPECT_NEAR(static_cast<double>(r.post_selected) / 1e5, 0.25, 0.01);
  EXPECT_NEAR(r.sifted_rate.value, 0.25, 0.01);
  EXPECT_EQ(r.qber.value, 0.0);
  EXPECT_TRUE(r.keys_identical);
  EXPECT_EQ(run.alice_key, run.bob_key);
  EXPECT_EQ(run.alice_key.size(), r.sifted);
  EXPECT_EQ(r.key_bits(), 2u);
}

TEST(Protocol, SingleChannelFixedBasisEve) {
  const auto run = single_channel_baseline(100000, {EveKind::fixed_basis, 1.0, EveTarget::polarization}, 3);
  const auto& r = run.report;
  EXPECT_EQ(r.post_selected, 100000u);
  EXPECT_NEAR(r.qber.value, 0.25, 0.01);
  EXPECT_NEAR(r.mi_polarization.value, 0.5, 0.01);
  EXPECT_FALSE(r.mi_phase.has_value());
}

TEST(Protocol, SingleChannelBreidbartEve) {
  const auto run = single_channel_baseline(100000, {EveKind::breidbart, 1.0, EveTarget::polarization}, 5);
  EXPECT_NEAR(run.report.qber.value, 0.25, 0.01);
  EXPECT_NEAR(run.report.mi_polarization.value, 0.399124, 0.015);
}

TEST(Protocol, DoubleChannelFixedBasisEve) {
  const auto run = run_protocol({}, ChannelKind::double_entangled, 400000,
                                {EveKind::fixed_basis, 1.0, EveTarget::both}, 11);
  const auto& r = run.report;
  EXPECT_NEAR(r.qber.value, 0.25, 0.01);
  EXPECT_NEAR(r.p_full_symbol.value, 0.25, 0.01);
  EXPECT_NEAR(r.symbol_error_rate.value, 0.4375, 0.015);
  EXPECT_FALSE(r.keys_identical);
}

TEST(Protocol, ErrorsGrowWithInterceptFraction) {
  const std::vector<double> fractions{0.0, 0.5, 1.0};
  const auto rows = eve_sweep({}, ChannelKind::double_entangled, EveKind::fixed_basis, EveTarget::both,
                              fractions, 100000, 1);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].qber.value, 0.0);
  EXPECT_GT(rows[1].qber.value, rows[0].qber.value);
  EXPECT_GT(rows[2].qber.value, rows[1].qber.value);
  EXPECT_GT(rows[2].mi_symbol.value, rows[1].mi_symbol.value);
}

TEST(Protocol, DeterministicAndBatchIndependent) {
  const EveStrategy eve{EveKind::breidbart, 0.5, EveTarget::both};
  std::vector<RoundRecord> t1, t2;
  const auto a = run_protocol({}, ChannelKind::double_entangled, 200, eve, 9, {}, &t1);
  const auto b = run_protocol({}, ChannelKind::double_entangled, 400, eve, 9, {}, &t2);
  ASSERT_EQ(t1.size(), 200u);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    EXPECT_EQ(t1[i].alice_pol, t2[i].alice_pol);
    EXPECT_EQ(t1[i].bob_phase, t2[i].bob_phase);
    EXPECT_EQ(t1[i].eve_attacked, t2[i].eve_attacked);
    EXPECT_EQ(t1[i].sifted, t2[i].sifted);
  }
  const auto c = run_protocol({}, ChannelKind::double_entangled, 200, eve, 9);
  EXPECT_EQ(a.alice_key, c.alice_key);
  EXPECT_EQ(a.bob_key, c.bob_key);
  (void)b;
}

TEST(Protocol, RejectsInvalidRequests) {
  EXPECT_THROW(run_protocol({}, ChannelKind::double_entangled, 0, {}, 1), std::invalid_argument);
  EXPECT_THROW(run_protocol({}, ChannelKind::single_entangled, 10,
                            {EveKind::fixed_basis, 1.0, EveTarget::phase}, 1),
               std::invalid_argument);
  EXPECT_THROW(run_protocol({}, ChannelKind::double_entangled, 10,
                            {EveKind::fixed_basis, 1.5, EveTarget::both}, 1),
               std::invalid_argument);
}

TEST(Disturbance, DoubleChannelDisturbsMore) {
  const auto r = disturbance_ratio(EveKind::fixed_basis, InformationMetric::mutual_information, 0.2,
                                   100000, 7);
  ASSERT_TRUE(r.reachable);
  EXPECT_GT(r.ratio.value, 1.0);
  EXPECT_GT(r.significance, 5.0);
  EXPECT_NEAR(r.eta_single * r.metric_single_full.value, 0.2, 1e-12);
}

TEST(Disturbance, CertaintyUnreachableForBreidbart) {
  const auto r = disturbance_ratio(EveKind::breidbart, InformationMetric::full_symbol_certainty,
                                   0.2, 20000, 7);
  EXPECT_FALSE(r.reachable);
  EXPECT_FALSE(r.note.empty());
}
