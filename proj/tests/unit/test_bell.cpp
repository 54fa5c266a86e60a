#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "biphoton/bell.hpp"

using namespace biphoton;
using namespace biphoton::bell;

namespace {

ChConfiguration angles(double t1, double t2, double t1p, double t2p) {
  ChConfiguration c;
  c.theta1 = t1;
  c.theta2 = t2;
  c.theta1p = t1p;
  c.theta2p = t2p;
  return c;
}

// Direct evaluation with ideal polarizers; independent of the library.
double ch_ideal(double f, double t1, double t2, double t1p, double t2p) {
  auto n = [f](double a, double b) {
    const double ra = a * M_PI / 180.0, rb = b * M_PI / 180.0;
    const double amp = std::sin(ra) * std::sin(rb) + f * std::cos(ra) * std::cos(rb);
    return amp * amp / (1.0 + f * f);
  };
  auto single = [f](double a) {
    const double r = a * M_PI / 180.0;
    return (std::pow(std::sin(r), 2) + f * f * std::pow(std::cos(r), 2)) / (1.0 + f * f);
  };
  return n(t1, t2) - n(t1, t2p) + n(t1p, t2) + n(t1p, t2p) - single(t1p) - single(t2);
}

double circular_distance(double a, double b) {
  const double d = reduce_angle(a - b);
  return std::min(d, 180.0 - d);
}

}  // namespace

TEST(ChSubstituted, MaximallyEntangledOptimum) {
  const auto r = ch_substituted(BiphotonState::maximally_entangled(), angles(67.5, 45, 22.5, 0));
  EXPECT_NEAR(r.value, (std::sqrt(2.0) - 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(r.value, 0.2071068, 1e-7);
}

TEST(ChSubstituted, PartiallyEntangledReferencePoints) {
  const BiphotonState s(0.4);
  EXPECT_NEAR(ch_substituted(s, angles(72.24, 45, 17.76, 0)).value, 0.1072968, 1e-7);
  EXPECT_NEAR(ch_substituted(s, angles(67.5, 45, 22.5, 0)).value, 0.0973833, 1e-7);
}

TEST(ChSubstituted, MatchesDirectFormula) {
  for (double f : {0.0, 0.3, 1.0, 2.5})
    for (auto [a, b, c, d] : {std::array<double, 4>{10, 20, 30, 40}, {67.5, 45, 22.5, 0}, {-5, 170, 88, 3}}) {
      EXPECT_NEAR(ch_substituted(BiphotonState(f), angles(a, b, c, d)).value, ch_ideal(f, a, b, c, d),
                  1e-14);
    }
}

TEST(ChSubstituted, ScalesWithProductOfEfficiencies) {
  auto c = angles(67.5, 45, 22.5, 0);
  const double full = ch_substituted(BiphotonState(0.7), c).value;
  c.efficiency = {0.8, 0.5};
  EXPECT_NEAR(ch_substituted(BiphotonState(0.7), c).value, 0.4 * full, 1e-14);
}

TEST(ChStrict, EqualsSubstitutedAtUnitEfficiency) {
  const auto c = angles(72.0, 40.0, 15.0, 3.0);
  EXPECT_NEAR(ch_strict(BiphotonState(0.6), c).value, ch_substituted(BiphotonState(0.6), c).value,
              1e-14);
}

TEST(ChStrict, SinglesScaleWithOneEfficiency) {
  auto c = angles(67.5, 45, 22.5, 0);
  c.efficiency = {0.9, 0.7};
  const auto r = ch_strict(BiphotonState::maximally_entangled(), c);
  const double coinc = 0.63 * (0.5 * std::pow(std::cos(22.5 * M_PI / 180), 2) * 3 -
                               0.5 * std::pow(std::cos(67.5 * M_PI / 180), 2));
  EXPECT_NEAR(r.value, coinc - 0.9 * 0.5 - 0.7 * 0.5, 1e-14);
  EXPECT_EQ(r.form, ChForm::strict);
}

TEST(ChEvaluate, RejectsInvalidInputs) {
  auto c = angles(0, 0, 0, 0);
  c.efficiency = {1.2, 1.0};
  EXPECT_THROW(ch_substituted(BiphotonState(1.0), c), std::invalid_argument);
  c.efficiency = {1.0, 1.0};
  c.analyzers[0] = {0.4, 0.5};
  EXPECT_THROW(ch_strict(BiphotonState(1.0), c), std::invalid_argument);
}

TEST(ChOptimize, MaximallyEntangledAngles) {
  const auto opt = ch_optimize(BiphotonState::maximally_entangled(), {}, {}, ChForm::substituted);
  EXPECT_NEAR(opt.result.value, 0.2071068, 1e-7);
  EXPECT_NEAR(opt.config.theta1, 67.5, 1e-3);
  EXPECT_NEAR(opt.config.theta2, 45.0, 1e-3);
  EXPECT_NEAR(opt.config.theta1p, 22.5, 1e-3);
  EXPECT_NEAR(opt.config.theta2p, 0.0, 1e-3);
  EXPECT_GE(opt.result.value, opt.coarse_grid_value - 1e-12);
}

TEST(ChOptimize, NeverBelowExhaustiveGrid) {
  // 5 degree grid over all four angles, evaluated directly.
  for (double f : {0.4, 1.0}) {
    double grid_best = -1.0;
    for (int a = 0; a < 36; ++a)
      for (int b = 0; b < 36; ++b)
        for (int c = 0; c < 36; ++c)
          for (int d = 0; d < 36; ++d)
            grid_best = std::max(grid_best, ch_ideal(f, 5.0 * a, 5.0 * b, 5.0 * c, 5.0 * d));
    const auto opt = ch_optimize(BiphotonState(f), {}, {}, ChForm::substituted);
    EXPECT_GE(opt.result.value, grid_best - 1e-12) << "f=" << f;
  }
}

TEST(ChOptimize, PartiallyEntangledMatchesFineSearch) {
  // With theta2 = 45, theta2' = 0 the sum separates into a theta1 part and a
  // theta1' part; each is maximized on a 0.001 degree grid.
  const double f = 0.4;
  double best1 = -1e9, arg1 = 0, best1p = -1e9, arg1p = 0;
  for (int i = 0; i < 180000; ++i) {
    const double t = i * 1e-3;
    const double v1 = ch_ideal(f, t, 45, 0, 0) - ch_ideal(f, 0, 45, 0, 0);
    const double v1p = ch_ideal(f, 0, 45, t, 0) - ch_ideal(f, 0, 45, 0, 0);
    if (v1 > best1) best1 = v1, arg1 = t;
    if (v1p > best1p) best1p = v1p, arg1p = t;
  }
  const auto opt = ch_optimize(BiphotonState(f), {}, {}, ChForm::substituted);
  EXPECT_NEAR(opt.result.value, ch_ideal(f, arg1, 45, arg1p, 0), 1e-9);
  EXPECT_NEAR(opt.result.value, 0.1073764, 1e-7);
  EXPECT_LT(circular_distance(opt.config.theta1, arg1), 2e-3);
  EXPECT_LT(circular_distance(opt.config.theta1p, arg1p), 2e-3);
  EXPECT_NEAR(opt.config.theta1, 72.7039, 1e-3);
  EXPECT_NEAR(opt.config.theta1p, 17.2961, 1e-3);
  EXPECT_NEAR(opt.config.theta2, 45.0, 1e-6);
  EXPECT_NEAR(opt.config.theta2p, 0.0, 1e-6);
}

TEST(ChOptimize, ProductStateHasNoViolation) {
  const auto opt = ch_optimize(BiphotonState::product(), {}, {}, ChForm::substituted);
  EXPECT_NEAR(opt.result.value, 0.0, 1e-12);
}

TEST(ChOptimize, LeakyPolarizersReduceMaximum) {
  const AnalyzerPair leaky{AnalyzerQuality{1.0, 0.01}, AnalyzerQuality{1.0, 0.01}};
  const auto ideal = ch_optimize(BiphotonState(0.4), {}, {}, ChForm::substituted);
  const auto lossy = ch_optimize(BiphotonState(0.4), {}, leaky, ChForm::substituted);
  EXPECT_LT(lossy.result.value, ideal.result.value);
  EXPECT_GT(lossy.result.value, 0.0);
}

TEST(ChOptimize, CanonicalAnglesAreReflectionInvariant) {
  const BiphotonState s(0.4);
  const auto c = canonical_angles(s, angles(-72.0, -45.0, -17.0, 0.0));
  EXPECT_NEAR(c.theta1, 72.0, 1e-12);
  EXPECT_NEAR(c.theta2, 45.0, 1e-12);
  EXPECT_NEAR(c.theta1p, 17.0, 1e-12);
  EXPECT_NEAR(ch_substituted(s, c).value, ch_substituted(s, angles(-72, -45, -17, 0)).value, 1e-14);
}

TEST(CriticalEfficiency, MaximallyEntangled) {
  EXPECT_NEAR(critical_efficiency(BiphotonState::maximally_entangled()), 2.0 * (std::sqrt(2.0) - 1.0),
              1e-4);
}

TEST(CriticalEfficiency, WeaklyEntangledApproachesTwoThirds) {
  const double eta = critical_efficiency(BiphotonState(0.01));
  EXPECT_GT(eta, 2.0 / 3.0);
  EXPECT_LT(eta, 0.672);
  EXPECT_LT(critical_efficiency(BiphotonState(0.4)), critical_efficiency(BiphotonState(1.0)));
}

TEST(CriticalEfficiency, RejectsProductState) {
  EXPECT_THROW(critical_efficiency(BiphotonState::product()), std::invalid_argument);
}

TEST(LoopholeMap, MonotoneInEfficiencyAndThreadIndependent) {
  const std::vector<double> f{0.2, 0.5, 1.0};
  const std::vector<double> eta{0.6, 0.75, 0.9, 1.0};
  const auto m1 = loophole_map(f, eta, {}, 1);
  const auto m3 = loophole_map(f, eta, {}, 3);
  EXPECT_EQ(m1.ch_over_n, m3.ch_over_n);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 1; j < eta.size(); ++j) EXPECT_GT(m1.at(i, j), m1.at(i, j - 1));
  EXPECT_NEAR(m1.at(2, 3), 0.2071068, 1e-6);
  EXPECT_LT(m1.at(0, 0), 0.0);
}

TEST(LoopholeMap, RejectsBadGrids) {
  const std::vector<double> f{0.5, 0.4};
  const std::vector<double> eta{0.9, 1.0};
  EXPECT_THROW(loophole_map(f, eta), std::invalid_argument);
  const std::vector<double> f_ok{0.5};
  const std::vector<double> eta_bad{0.9, 1.1};
  EXPECT_THROW(loophole_map(f_ok, eta_bad), std::invalid_argument);
  EXPECT_THROW(loophole_map(f_ok, std::vector<double>{}), std::invalid_argument);
}

TEST(ChCounts, RateAndPoissonError) {
  const auto c = angles(67.5, 45, 22.5, 0);
  const auto r = ch_counts(BiphotonState::maximally_entangled(), c, {1e4, 0.0, 1.0});
  EXPECT_NEAR(r.rate, 1e4 * 0.2071068, 1e-2);
  double total = 0.0;
  for (double t : r.term_rates) total += t;
  EXPECT_NEAR(r.standard_error, std::sqrt(total), 1e-9);
  ASSERT_TRUE(r.significance.has_value());
  // Four times the acquisition halves the error on the rate.
  const auto longer = ch_counts(BiphotonState::maximally_entangled(), c, {1e4, 0.0, 4.0});
  EXPECT_NEAR(longer.standard_error, r.standard_error / 2.0, 1e-9);
  EXPECT_NEAR(*longer.significance, 2.0 * *r.significance, 1e-9);
}

TEST(ChCounts, BackgroundCancelsInRateButNotInError) {
  const auto c = angles(67.5, 45, 22.5, 0);
  const auto clean = ch_counts(BiphotonState::maximally_entangled(), c, {1e4, 0.0, 1.0});
  const auto noisy = ch_counts(BiphotonState::maximally_entangled(), c, {1e4, 100.0, 1.0});
  EXPECT_GT(noisy.standard_error, clean.standard_error);
}

TEST(ChCounts, NoPairsNoSignificance) {
  const auto r = ch_counts(BiphotonState::maximally_entangled(), angles(0, 0, 0, 0), {0.0, 0.0, 1.0});
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_FALSE(r.significance.has_value());
}
