#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "biphoton/double_slit.hpp"
#include "biphoton/error.hpp"

using namespace biphoton;
using namespace biphoton::double_slit;

namespace {

constexpr double kD1 = 1.21;
constexpr double kD2 = 1.5;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

DetectorPlane plane(double d, double aperture, std::vector<double> x = {}) {
  DetectorPlane p;
  p.distance = d;
  p.aperture = aperture;
  p.positions = std::move(x);
  return p;
}

std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

TEST(Geometry, FringePeriodAndEnvelopeZero) {
  const SlitGeometry g;
  EXPECT_NEAR(fringe_period(g, kD1), 8.4942e-3, 1e-7);
  const double zero = g.wavelength * kD1 / g.width;
  EXPECT_NEAR(zero, 84.942e-3, 1e-6);
  EXPECT_NEAR(std::abs(slit_amplitude(g, Slit::a, kD1, zero)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(slit_amplitude(g, Slit::b, kD1, 0.0)), 1.0, 1e-15);
}

TEST(Geometry, FarFieldCheck) {
  const SlitGeometry g;
  EXPECT_NO_THROW(check_fraunhofer(g, kD1));
  EXPECT_THROW(check_fraunhofer(g, 0.05), ModelValidityError);
  SlitGeometry bad;
  bad.width = 2e-4;
  EXPECT_THROW(check_fraunhofer(bad, kD1), std::invalid_argument);
}

TEST(PointDensity, MaximaWhereAnglesMatch) {
  const SlitGeometry g;
  for (double x1 : {-0.02, 0.003, 0.011}) {
    const double x2 = x1 * kD2 / kD1;
    const double env = std::norm(slit_amplitude(g, Slit::a, kD1, x1)) *
                       std::norm(slit_amplitude(g, Slit::a, kD2, x2));
    EXPECT_NEAR(sqm_point_density(g, kD1, kD2, x1, x2), 4.0 * env, 1e-12);
    // Half a fringe away on plane 1 the two paths cancel.
    const double x1_dark = x1 + 0.5 * fringe_period(g, kD1);
    EXPECT_NEAR(sqm_point_density(g, kD1, kD2, x1_dark, x2), 0.0, 1e-12);
  }
}

TEST(PointDensity, InversionSymmetric) {
  const SlitGeometry g;
  for (double x1 : {-0.017, 0.004})
    for (double x2 : {-0.055, 0.02})
      EXPECT_NEAR(sqm_point_density(g, kD1, kD2, x1, x2), sqm_point_density(g, kD1, kD2, -x1, -x2),
                  1e-14);
}

TEST(PointDensity, SlitPhaseIsGlobal) {
  SlitGeometry g;
  const double ref = sqm_point_density(g, kD1, kD2, 0.004, -0.02);
  g.relative_phase = 1.3;
  EXPECT_NEAR(sqm_point_density(g, kD1, kD2, 0.004, -0.02), ref, 1e-14);
}

TEST(ApertureDensity, SmallApertureLimit) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, 1e-6);
  const auto p2 = plane(kD2, 1e-6);
  for (double x1 : {-0.017, 0.001})
    for (double x2 : {-0.055, 0.013}) {
      const double point = sqm_point_density(g, kD1, kD2, x1, x2);
      EXPECT_NEAR(sqm_density(g, p1, x1, p2, x2), point, 1e-6 * point);
    }
}

TEST(ApertureDensity, FiniteApertureWashesOutContrast) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, fringe_period(g, kD1));
  const auto p2 = plane(kD2, 0.0);
  // A full-period aperture averages cos^2 to one half.
  const double env = 4.0 * std::norm(slit_amplitude(g, Slit::a, kD1, 0.0));
  EXPECT_NEAR(sqm_density(g, p1, 0.0, p2, 0.0) / env, 0.5, 0.01);
}

TEST(Comparator, SameSemiplaneSuppressed) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, 2e-3);
  const auto p2 = plane(kD2, 6e-3);
  EXPECT_GT(sqm_density(g, p1, -0.017, p2, -0.055), 0.0);
  EXPECT_EQ(dbb_density(g, p1, -0.017, p2, -0.055), 0.0);
  EXPECT_EQ(dbb_density(g, p1, 0.017, p2, 0.055), 0.0);
  EXPECT_EQ(dbb_density(g, p1, -0.017, p2, 0.055), sqm_density(g, p1, -0.017, p2, 0.055));
}

TEST(JointPattern, NormalizedAndDistinguishable) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, 2e-3, linspace(-0.03, 0.03, 61));
  const auto p2 = plane(kD2, 6e-3, linspace(-0.06, 0.06, 121));
  const auto sqm = sqm_joint_pattern(g, p1, p2);
  const auto dbb = dbb_joint_pattern(g, p1, p2);
  EXPECT_NEAR(std::accumulate(sqm.density.begin(), sqm.density.end(), 0.0), 1.0, 1e-12);
  EXPECT_NEAR(std::accumulate(dbb.density.begin(), dbb.density.end(), 0.0), 1.0, 1e-12);
  EXPECT_NEAR(std::accumulate(sqm.marginal1.begin(), sqm.marginal1.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(sqm.marginal2.size(), 121u);
  double l1 = 0.0;
  for (std::size_t i = 0; i < sqm.density.size(); ++i) l1 += std::fabs(sqm.density[i] - dbb.density[i]);
  EXPECT_GT(l1, 0.1);
  EXPECT_EQ(dbb.at(10, 10), 0.0);
}

TEST(JointPattern, RejectsCoarseOrUnsortedGrid) {
  const SlitGeometry g;
  const auto p2 = plane(kD2, 6e-3, linspace(-0.06, 0.06, 121));
  EXPECT_THROW(sqm_joint_pattern(g, plane(kD1, 2e-3, linspace(-0.03, 0.03, 11)), p2),
               std::invalid_argument);
  EXPECT_THROW(sqm_joint_pattern(g, plane(kD1, 2e-3, {0.01, 0.0}), p2), std::invalid_argument);
  EXPECT_THROW(sqm_joint_pattern(g, plane(kD1, 2e-3, {0.0}), p2), std::invalid_argument);
}

TEST(Coincidences, MeasuredPeriodMatchesGeometry) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, 2e-3);
  const auto p2 = plane(kD2, 6e-3);
  const auto x = linspace(-0.03, 0.03, 1201);
  std::vector<double> y;
  for (double xi : x) y.push_back(sqm_density(g, p1, xi, p2, -0.01));
  EXPECT_NEAR(measured_period(x, y) / fringe_period(g, kD1), 1.0, 0.02);
  std::vector<double> flat(x.size(), 1.0);
  EXPECT_THROW(measured_period(x, flat), EstimationError);
}

TEST(Singles, InterferenceWashedOut) {
  const SlitGeometry g;
  const auto p1 = plane(kD1, 2e-3, linspace(-0.03, 0.03, 121));
  const double half_range = 3.0 * g.wavelength * kD2 / g.width;
  const auto singles = sqm_singles_pattern(g, p1, kD2, half_range);
  const auto incoherent = incoherent_singles(g, p1);
  EXPECT_LT(singles_visibility(singles, incoherent), 0.05);

  const auto a = normalized(singles);
  const auto b = normalized(incoherent);
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  EXPECT_LT(std::sqrt(diff / norm), 0.02);

  // Near the axis the singles follow the incoherent envelope to within 3%.
  const std::size_t mid = a.size() / 2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(p1.positions[i]) > 7.5e-3) continue;
    EXPECT_NEAR((a[i] / b[i]) / (a[mid] / b[mid]), 1.0, 0.03) << p1.positions[i];
  }
  EXPECT_THROW(sqm_singles_density(g, p1, 0.0, kD2, 0.01), std::invalid_argument);
}

TEST(ChiSquare, ExactModelFitsPerfectly) {
  CountData d;
  std::vector<double> model;
  for (int i = 0; i < 8; ++i) {
    const double m = 1.0 + std::sin(0.7 * i) * 0.5;
    model.push_back(m);
    d.position.push_back(0.001 * i);
    d.counts.push_back(3.0 * m);
    d.uncertainty.push_back(1.0);
  }
  const auto r = chi_square_compare(d, std::span<const double>(model), {});
  EXPECT_NEAR(r.chi2, 0.0, 1e-20);
  EXPECT_EQ(r.dof, 7);
  ASSERT_EQ(r.parameters.size(), 1u);
  EXPECT_NEAR(r.parameters[0], 3.0, 1e-12);

  const auto line = chi_square_compare(d, std::nullopt, {true, true});
  EXPECT_GT(line.chi2, 0.0);
  EXPECT_EQ(line.dof, 6);
}

TEST(ChiSquare, StraightLineFitsLineExactly) {
  CountData d;
  for (int i = 0; i < 6; ++i) {
    d.position.push_back(i * 0.5);
    d.counts.push_back(2.0 + 4.0 * i * 0.5);
    d.uncertainty.push_back(0.5);
  }
  const auto r = chi_square_compare(d, std::nullopt, {true, true});
  EXPECT_NEAR(r.chi2, 0.0, 1e-18);
  EXPECT_NEAR(r.parameters[0], 2.0, 1e-12);
  EXPECT_NEAR(r.parameters[1], 4.0, 1e-12);
}

TEST(ChiSquare, RejectsDegenerateInputs) {
  CountData d{{0.0, 1.0}, {1.0, 2.0}, {1.0, 1.0}};
  EXPECT_THROW(chi_square_compare(d, std::nullopt, {true, true}), std::invalid_argument);
  CountData z{{0, 1, 2, 3}, {1, 2, 3, 4}, {1, 1, 1, 1}};
  const std::vector<double> zeros(4, 0.0);
  EXPECT_THROW(chi_square_compare(z, std::span<const double>(zeros), {}), EstimationError);
  CountData neg{{0, 1, 2, 3}, {1, 2, 3, 4}, {1, 0, 1, 1}};
  EXPECT_THROW(chi_square_compare(neg, std::nullopt, {true, false}), std::invalid_argument);
}

TEST(ChiSquare, SyntheticDataPrefersInterference) {
  const SlitGeometry g;
  const auto mobile = plane(kD1, 2e-3, linspace(-0.0075, 0.0075, 7));
  const auto fixed = plane(kD2, 6e-3);
  const auto a = synthetic_counts(g, mobile, fixed, -0.01, 100.0, 3);
  const auto b = synthetic_counts(g, mobile, fixed, -0.01, 100.0, 3);
  EXPECT_EQ(a.counts, b.counts);
  std::vector<double> model;
  for (double x : mobile.positions) model.push_back(sqm_density(g, mobile, x, fixed, -0.01));
  const auto sqm = chi_square_compare(a, std::span<const double>(model), {});
  const auto line = chi_square_compare(a, std::nullopt, {true, true});
  EXPECT_LT(sqm.reduced, line.reduced);
}
