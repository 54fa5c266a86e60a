#include "biphoton/double_slit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "biphoton/error.hpp"
#include "biphoton/mc/rng.hpp"
#include "biphoton/mc/sampling.hpp"

namespace biphoton::double_slit {

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

void SlitGeometry::validate() const {
  if (!(separation > 0.0 && width > 0.0 && wavelength > 0.0) || !(width < separation) ||
      !std::isfinite(relative_phase)) {
    throw std::invalid_argument("SlitGeometry: need positive lengths with width < separation");
  }
}

void DetectorPlane::validate() const {
  if (!(distance > 0.0) || !(aperture >= 0.0) || !std::isfinite(distance) ||
      !std::isfinite(aperture)) {
    throw std::invalid_argument("DetectorPlane: distance must be positive, aperture >= 0");
  }
}

void check_fraunhofer(const SlitGeometry& g, double distance) {
  g.validate();
  if (!(distance > 0.0)) throw std::invalid_argument("check_fraunhofer: distance <= 0");
  const double scale = g.wavelength * distance;
  if (g.width * g.width / scale >= 0.1 || g.separation * g.separation / scale >= 0.1) {
    throw ModelValidityError("double slit: detector too close for far-field diffraction");
  }
}

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

ComplexAmplitude amplitude(const SlitGeometry& g, Slit slit, double distance, double x) {
  const double k = 2.0 * kPi / g.wavelength;
  const double center = slit == Slit::a ? -0.5 * g.separation : 0.5 * g.separation;
  const double envelope = sinc(kPi * g.width * x / (g.wavelength * distance));
  double phase = -k * center * x / distance;
  if (slit == Slit::b) phase += g.relative_phase;
  return std::polar(envelope, phase);
}

double point_density(const SlitGeometry& g, double d1, double d2, double x1, double x2) {
  const auto psi = amplitude(g, Slit::a, d1, x1) * amplitude(g, Slit::b, d2, x2) +
                   amplitude(g, Slit::b, d1, x1) * amplitude(g, Slit::a, d2, x2);
  return std::norm(psi);
}

// Mean of f over [x - a/2, x + a/2]; the point value for a == 0.
template <class F>
double aperture_mean(F&& f, double x, double aperture) {
  if (aperture == 0.0) return f(x);
  const double h = 0.5 * aperture;
  return Gauss16::integrate(f, x - h, x + h) / aperture;
}

void check_planes(const SlitGeometry& g, const DetectorPlane& p1, const DetectorPlane& p2) {
  p1.validate();
  p2.validate();
  check_fraunhofer(g, p1.distance);
  check_fraunhofer(g, p2.distance);
}

void check_grid(const SlitGeometry& g, const DetectorPlane& p, const char* name) {
  const auto& x = p.positions;
  if (x.size() < 2) throw std::invalid_argument(std::string(name) + ": need >= 2 positions");
  const double limit = 0.25 * fringe_period(g, p.distance);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw std::invalid_argument(std::string(name) + ": positions must increase");
    }
    if (x[i] - x[i - 1] > limit * (1.0 + 1e-12)) {
      throw std::invalid_argument(std::string(name) +
                                  ": grid step exceeds a quarter fringe period");
    }
  }
}

template <class Density>
JointPattern tabulate(const DetectorPlane& p1, const DetectorPlane& p2, Density&& density) {
  JointPattern out;
  out.x1 = p1.positions;
  out.x2 = p2.positions;
  const std::size_t n1 = out.x1.size();
  const std::size_t n2 = out.x2.size();
  out.density.resize(n1 * n2);
  double total = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double v = density(out.x1[i], out.x2[j]);
      out.density[i * n2 + j] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw EstimationError("joint pattern: zero density on the whole grid");
  out.marginal1.assign(n1, 0.0);
  out.marginal2.assign(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      double& v = out.density[i * n2 + j];
      v /= total;
      out.marginal1[i] += v;
      out.marginal2[j] += v;
    }
  }
  return out;
}

}  // namespace

double fringe_period(const SlitGeometry& g, double distance) {
  return g.wavelength * distance / g.separation;
}

ComplexAmplitude slit_amplitude(const SlitGeometry& g, Slit slit, double distance, double x) {
  check_fraunhofer(g, distance);
  return amplitude(g, slit, distance, x);
}

double sqm_point_density(const SlitGeometry& g, double d1, double d2, double x1, double x2) {
  check_fraunhofer(g, d1);
  check_fraunhofer(g, d2);
  return point_density(g, d1, d2, x1, x2);
}

double sqm_density(const SlitGeometry& g, const DetectorPlane& p1, double x1,
                   const DetectorPlane& p2, double x2) {
  check_planes(g, p1, p2);
  return aperture_mean(
      [&](double u1) {
        return aperture_mean(
            [&](double u2) { return point_density(g, p1.distance, p2.distance, u1, u2); }, x2,
            p2.aperture);
      },
      x1, p1.aperture);
}

double dbb_density(const SlitGeometry& g, const DetectorPlane& p1, double x1,
                   const DetectorPlane& p2, double x2) {
  if (x1 * x2 > 0.0) {
    check_planes(g, p1, p2);
    return 0.0;
  }
  return sqm_density(g, p1, x1, p2, x2);
}

JointPattern sqm_joint_pattern(const SlitGeometry& g, const DetectorPlane& p1,
                               const DetectorPlane& p2) {
  check_planes(g, p1, p2);
  check_grid(g, p1, "plane 1");
  check_grid(g, p2, "plane 2");
  return tabulate(p1, p2, [&](double x1, double x2) { return sqm_density(g, p1, x1, p2, x2); });
}

JointPattern dbb_joint_pattern(const SlitGeometry& g, const DetectorPlane& p1,
                               const DetectorPlane& p2) {
  check_planes(g, p1, p2);
  check_grid(g, p1, "plane 1");
  check_grid(g, p2, "plane 2");
  return tabulate(p1, p2, [&](double x1, double x2) { return dbb_density(g, p1, x1, p2, x2); });
}

double sqm_singles_density(const SlitGeometry& g, const DetectorPlane& plane, double x,
                           double partner_distance, double partner_half_range) {
  DetectorPlane partner{partner_distance, 0.0, {}};
  check_planes(g, plane, partner);
  const double zero_spacing = g.wavelength * partner_distance / g.width;
  if (!(partner_half_range >= 3.0 * zero_spacing * (1.0 - 1e-12))) {
    throw std::invalid_argument(
        "sqm_singles_density: partner range must cover six envelope zeros");
  }
  const double panel = 0.5 * fringe_period(g, partner_distance);
  const auto panels =
      static_cast<std::size_t>(std::ceil(2.0 * partner_half_range / panel));
  const double h = 2.0 * partner_half_range / static_cast<double>(panels);
  return aperture_mean(
      [&](double u1) {
        double sum = 0.0;
        for (std::size_t i = 0; i < panels; ++i) {
          const double lo = -partner_half_range + h * static_cast<double>(i);
          sum += Gauss16::integrate(
              [&](double u2) { return point_density(g, plane.distance, partner_distance, u1, u2); },
              lo, lo + h);
        }
        return sum;
      },
      x, plane.aperture);
}

std::vector<double> sqm_singles_pattern(const SlitGeometry& g, const DetectorPlane& plane,
                                        double partner_distance, double partner_half_range) {
  std::vector<double> out;
  out.reserve(plane.positions.size());
  for (double x : plane.positions) {
    out.push_back(sqm_singles_density(g, plane, x, partner_distance, partner_half_range));
  }
  return out;
}

std::vector<double> incoherent_singles(const SlitGeometry& g, const DetectorPlane& plane) {
  plane.validate();
  check_fraunhofer(g, plane.distance);
  std::vector<double> out;
  out.reserve(plane.positions.size());
  for (double x : plane.positions) {
    out.push_back(aperture_mean(
        [&](double u) {
          return std::norm(amplitude(g, Slit::a, plane.distance, u)) +
                 std::norm(amplitude(g, Slit::b, plane.distance, u));
        },
        x, plane.aperture));
  }
  return out;
}

double singles_visibility(std::span<const double> singles, std::span<const double> incoherent) {
  if (singles.size() != incoherent.size() || singles.empty()) {
    throw std::invalid_argument("singles_visibility: size mismatch");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < singles.size(); ++i) {
    if (!(incoherent[i] > 0.0)) continue;
    const double r = singles[i] / incoherent[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!(hi + lo > 0.0)) throw EstimationError("singles_visibility: no signal");
  return (hi - lo) / (hi + lo);
}

double measured_period(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("measured_period: need >= 3 samples of equal length");
  }
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) {
      // Vertex of the parabola through the three samples.
      const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
      const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
      const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
      const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
      minima.push_back(den != 0.0 ? x1 - 0.5 * num / den : x1);
    }
  }
  if (minima.size() < 2) throw EstimationError("measured_period: fewer than two minima");
  return (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
}

void CountData::validate() const {
  if (position.size() != counts.size() || position.size() != uncertainty.size()) {
    throw std::invalid_argument("CountData: column lengths differ");
  }
  for (std::size_t i = 0; i < position.size(); ++i) {
    if (!(uncertainty[i] > 0.0) || !std::isfinite(counts[i]) || !std::isfinite(position[i])) {
      throw std::invalid_argument("CountData: uncertainties must be positive and values finite");
    }
  }
}

ChiSquareResult chi_square_compare(const CountData& data,
                                   std::optional<std::span<const double>> model,
                                   FitTerms terms) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.position.size());
  const Eigen::Index p = (model ? 1 : 0) + (terms.background ? 1 : 0) + (terms.slope ? 1 : 0);
  if (p == 0) throw std::invalid_argument("chi_square_compare: nothing to fit");
  if (model && static_cast<Eigen::Index>(model->size()) != n) {
    throw std::invalid_argument("chi_square_compare: model length differs from data");
  }
  if (n < p + 2) throw std::invalid_argument("chi_square_compare: too few data points");

  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double w = 1.0 / data.uncertainty[k];
    Eigen::Index c = 0;
    if (model) a(i, c++) = (*model)[k] * w;
    if (terms.background) a(i, c++) = w;
    if (terms.slope) a(i, c++) = data.position[k] * w;
    b(i) = data.counts[k] * w;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < p) throw EstimationError("chi_square_compare: singular design");
  const Eigen::VectorXd beta = qr.solve(b);

  ChiSquareResult r;
  r.chi2 = (a * beta - b).squaredNorm();
  r.dof = static_cast<int>(n - p);
  r.reduced = r.chi2 / r.dof;
  r.parameters.assign(beta.data(), beta.data() + beta.size());
  return r;
}

CountData synthetic_counts(const SlitGeometry& g, const DetectorPlane& mobile,
                           const DetectorPlane& fixed, double fixed_x, double peak_counts,
                           std::uint64_t seed) {
  if (!(peak_counts > 0.0)) throw std::invalid_argument("synthetic_counts: peak_counts <= 0");
  if (mobile.positions.empty()) throw std::invalid_argument("synthetic_counts: no positions");
  std::vector<double> model;
  model.reserve(mobile.positions.size());
  for (double x : mobile.positions) model.push_back(sqm_density(g, mobile, x, fixed, fixed_x));
  const double peak = *std::max_element(model.begin(), model.end());
  if (!(peak > 0.0)) throw EstimationError("synthetic_counts: model vanishes");

  mc::RngStream rng(seed, 0, mc::domain::double_slit);
  CountData d;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto c = static_cast<double>(mc::poisson_sample(rng, peak_counts * model[i] / peak));
    d.position.push_back(mobile.positions[i]);
    d.counts.push_back(c);
    d.uncertainty.push_back(std::sqrt(std::max(c, 1.0)));
  }
  return d;
}

}  // namespace biphoton::double_slit
