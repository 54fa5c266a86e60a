#include "biphoton/bell.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "biphoton/error.hpp"

namespace biphoton::bell {

std::string_view to_string(ChForm form) noexcept {
  return form == ChForm::substituted ? "substituted" : "strict";
}

void Efficiencies::validate() const {
  ArmEfficiency{eta1}.validate();
  ArmEfficiency{eta2}.validate();
}

void ChConfiguration::validate() const {
  efficiency.validate();
  for (const auto& q : analyzers) q.at(0.0).validate();
  for (double t : {theta1, theta2, theta1p, theta2p}) {
    if (!std::isfinite(t)) throw std::invalid_argument("ChConfiguration: non-finite angle");
  }
}

namespace {

// The CH objective split by which angle each addend depends on.  Both forms
// share the same probabilities and differ only in how the single-count terms
// are scaled by the efficiencies.
class ChObjective {
 public:
  ChObjective(const BiphotonState& state, const Efficiencies& eff,
              const AnalyzerPair& analyzers, ChForm form)
      : state_(state), analyzers_(analyzers) {
    coinc_weight_ = eff.eta1 * eff.eta2;
    single1_weight_ = form == ChForm::substituted ? coinc_weight_ : eff.eta1;
    single2_weight_ = form == ChForm::substituted ? coinc_weight_ : eff.eta2;
  }

  double coinc(double t1, double t2) const {
    return coinc_weight_ *
           coincidence_prob(state_, analyzers_[0].at(t1), analyzers_[1].at(t2));
  }
  double single1(double t1p) const {
    return single1_weight_ *
           coincidence_prob(state_, analyzers_[0].at(t1p), AnalyzerSetting::absent());
  }
  double single2(double t2) const {
    return single2_weight_ *
           coincidence_prob(state_, AnalyzerSetting::absent(), analyzers_[1].at(t2));
  }

  std::array<double, 6> terms(const ChConfiguration& c) const {
    return {coinc(c.theta1, c.theta2), coinc(c.theta1, c.theta2p),
            coinc(c.theta1p, c.theta2), coinc(c.theta1p, c.theta2p),
            single1(c.theta1p),         single2(c.theta2)};
  }

 private:
  const BiphotonState& state_;
  AnalyzerPair analyzers_;
  double coinc_weight_;
  double single1_weight_;
  double single2_weight_;
};

ChResult assemble(const std::array<double, 6>& terms, ChForm form) {
  ChResult r;
  r.terms = terms;
  r.form = form;
  double v = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) v += kChSigns[i] * terms[i];
  r.value = v;
  return r;
}

// a + b cos(2t) + c sin(2t) sampled at t = 0, 45, 90 degrees.
struct Sinusoid {
  double a, b, c;
  static Sinusoid from_samples(double at0, double at45, double at90) {
    const double a = 0.5 * (at0 + at90);
    return {a, 0.5 * (at0 - at90), at45 - a};
  }
  double max() const { return a + std::hypot(b, c); }
  double argmax_deg() const { return reduce_angle(0.5 * rad_to_deg(std::atan2(c, b))); }
};

constexpr std::array<double, 3> kSampleAngles{0.0, 45.0, 90.0};

// Best theta1 and theta1' for given theta2, theta2'.
struct InnerOptimum {
  double value;
  double theta1;
  double theta1p;
};

class ReducedObjective {
 public:
  explicit ReducedObjective(const ChObjective& obj) : obj_(obj) {
    for (std::size_t j = 0; j < 3; ++j) single1_[j] = obj_.single1(kSampleAngles[j]);
  }

  InnerOptimum evaluate(double t2, double t2p) const {
    std::array<double, 3> c2{}, c2p{};
    for (std::size_t j = 0; j < 3; ++j) {
      c2[j] = obj_.coinc(kSampleAngles[j], t2);
      c2p[j] = obj_.coinc(kSampleAngles[j], t2p);
    }
    return combine(c2, c2p, obj_.single2(t2));
  }

  InnerOptimum combine(const std::array<double, 3>& c2, const std::array<double, 3>& c2p,
                       double single2) const {
    const auto first = Sinusoid::from_samples(c2[0] - c2p[0], c2[1] - c2p[1], c2[2] - c2p[2]);
    const auto primed = Sinusoid::from_samples(c2[0] + c2p[0] - single1_[0],
                                               c2[1] + c2p[1] - single1_[1],
                                               c2[2] + c2p[2] - single1_[2]);
    return {first.max() + primed.max() - single2, first.argmax_deg(), primed.argmax_deg()};
  }

  double value(double t2, double t2p) const { return evaluate(t2, t2p).value; }

 private:
  const ChObjective& obj_;
  std::array<double, 3> single1_{};
};

template <class F>
double golden_maximize(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 < f2 ? x2 : x1;
}

double circular_distance(double a, double b) {
  const double d = reduce_angle(a - b);
  return std::min(d, 180.0 - d);
}

struct Point2 {
  double t2;
  double t2p;
  double value;
};

struct GridTables {
  std::vector<double> angles;
  std::vector<std::array<double, 3>> coinc;  // per grid angle, at the sample angles
  std::vector<double> single2;
};

GridTables tabulate(const ChObjective& obj, double step) {
  const auto n = static_cast<std::size_t>(std::llround(180.0 / step));
  if (n < 4) throw std::invalid_argument("ch_optimize: grid step too coarse");
  GridTables t;
  t.angles.resize(n);
  t.coinc.resize(n);
  t.single2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 180.0 * static_cast<double>(k) / static_cast<double>(n);
    t.angles[k] = angle;
    for (std::size_t j = 0; j < 3; ++j) t.coinc[k][j] = obj.coinc(kSampleAngles[j], angle);
    t.single2[k] = obj.single2(angle);
  }
  return t;
}

Point2 coarse_search(const ReducedObjective& reduced, const GridTables& t,
                     std::optional<std::size_t> pinned_primed) {
  Point2 best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
  const std::size_t n = t.angles.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m_begin = pinned_primed ? *pinned_primed : 0;
    const std::size_t m_end = pinned_primed ? *pinned_primed + 1 : n;
    for (std::size_t m = m_begin; m < m_end; ++m) {
      const double v = reduced.combine(t.coinc[k], t.coinc[m], t.single2[k]).value;
      if (v > best.value) best = {t.angles[k], t.angles[m], v};
    }
  }
  return best;
}

// Coordinate-wise golden-section ascent on the reduced objective.
Point2 refine(const ReducedObjective& reduced, Point2 start, bool pin_primed,
              const OptimizerOptions& opt, int& sweeps) {
  Point2 x = start;
  const double h = opt.grid_step_deg;
  for (sweeps = 1; sweeps <= opt.max_sweeps; ++sweeps) {
    const Point2 before = x;

    const double t2 = golden_maximize([&](double t) { return reduced.value(t, x.t2p); },
                                      x.t2 - h, x.t2 + h, opt.angle_tol_deg);
    if (const double v = reduced.value(t2, x.t2p); v > x.value) x = {t2, x.t2p, v};

    if (!pin_primed) {
      const double t2p = golden_maximize([&](double t) { return reduced.value(x.t2, t); },
                                         x.t2p - h, x.t2p + h, opt.angle_tol_deg);
      if (const double v = reduced.value(x.t2, t2p); v > x.value) x = {x.t2, t2p, v};
    }

    const double move = std::max(std::fabs(x.t2 - before.t2), std::fabs(x.t2p - before.t2p));
    const double gain = x.value - before.value;
    if (gain <= opt.value_tol * std::max(1.0, std::fabs(x.value)) &&
        (move <= 1e3 * opt.angle_tol_deg || gain <= 4 * std::numeric_limits<double>::epsilon())) {
      return x;
    }
  }
  throw ConvergenceError("ch_optimize: coordinate refinement did not settle");
}

}  // namespace

ChResult ch_evaluate(const BiphotonState& state, const ChConfiguration& config,
                     ChForm form) {
  config.validate();
  const ChObjective obj(state, config.efficiency, config.analyzers, form);
  return assemble(obj.terms(config), form);
}

ChResult ch_substituted(const BiphotonState& state, const ChConfiguration& config) {
  return ch_evaluate(state, config, ChForm::substituted);
}

ChResult ch_strict(const BiphotonState& state, const ChConfiguration& config) {
  return ch_evaluate(state, config, ChForm::strict);
}

ChConfiguration canonical_angles(const BiphotonState& state, ChConfiguration c) {
  for (double* t : {&c.theta1, &c.theta2, &c.theta1p, &c.theta2p}) *t = reduce_angle(*t);
  // theta -> -theta on every analyzer maps f to f*, so it is a symmetry only
  // for real f.
  if (state.f().imag() == 0.0 && c.theta2 > 90.0) {
    for (double* t : {&c.theta1, &c.theta2, &c.theta1p, &c.theta2p}) *t = reduce_angle(-*t);
  }
  // Snap values that are zero up to round-off.
  for (double* t : {&c.theta1, &c.theta2, &c.theta1p, &c.theta2p}) {
    if (circular_distance(*t, 0.0) < 1e-9) *t = 0.0;
  }
  return c;
}

ChOptimum ch_optimize(const BiphotonState& state, const Efficiencies& efficiency,
                      const AnalyzerPair& analyzers, ChForm form,
                      const OptimizerOptions& options) {
  efficiency.validate();
  for (const auto& q : analyzers) q.at(0.0).validate();
  if (!(options.grid_step_deg > 0.0) || !(options.angle_tol_deg > 0.0)) {
    throw std::invalid_argument("ch_optimize: step and tolerance must be positive");
  }

  const ChObjective obj(state, efficiency, analyzers, form);
  const ReducedObjective reduced(obj);
  const GridTables tables = tabulate(obj, options.grid_step_deg);

  const Point2 coarse = coarse_search(reduced, tables, std::nullopt);
  int sweeps = 0;
  Point2 best = refine(reduced, coarse, false, options, sweeps);

  // Prefer the representative with theta2' = 0 when it attains the maximum.
  int pinned_sweeps = 0;
  const Point2 pinned_coarse = coarse_search(reduced, tables, std::size_t{0});
  const Point2 pinned = refine(reduced, pinned_coarse, true, options, pinned_sweeps);
  const double pin_tol = 1e-10 * std::max(1.0, std::fabs(best.value));
  if (pinned.value >= std::max(best.value, coarse.value) - pin_tol) best = pinned;

  const InnerOptimum inner = reduced.evaluate(best.t2, best.t2p);
  ChConfiguration config;
  config.theta1 = inner.theta1;
  config.theta2 = best.t2;
  config.theta1p = inner.theta1p;
  config.theta2p = best.t2p;
  config.analyzers = analyzers;
  config.efficiency = efficiency;
  config = canonical_angles(state, config);

  ChOptimum out;
  out.config = config;
  out.result = assemble(obj.terms(config), form);
  out.coarse_grid_value = coarse.value;
  out.sweeps = sweeps;
  return out;
}

double max_strict_ch_per_detection(const BiphotonState& state, double eta,
                                   const OptimizerOptions& options) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("max_strict_ch_per_detection: eta must lie in (0, 1]");
  }
  const AnalyzerPair ideal{AnalyzerQuality::ideal(), AnalyzerQuality::ideal()};
  const auto opt = ch_optimize(state, {eta, eta}, ideal, ChForm::strict, options);
  return opt.result.value / eta;
}

double critical_efficiency(const BiphotonState& state, double tolerance,
                           const OptimizerOptions& options) {
  const double modulus = std::abs(state.f());
  if (!(modulus > 0.0 && modulus <= 1.0)) {
    throw std::invalid_argument("critical_efficiency: requires 0 < |f| <= 1");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("critical_efficiency: tolerance <= 0");

  double hi = 1.0;
  if (max_strict_ch_per_detection(state, hi, options) <= 0.0) {
    throw EstimationError("critical_efficiency: no violation even at unit efficiency");
  }
  double lo = 0.5;
  while (max_strict_ch_per_detection(state, lo, options) > 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-6) throw EstimationError("critical_efficiency: no lower bracket");
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (max_strict_ch_per_detection(state, mid, options) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

void require_increasing(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
    }
  }
}

}  // namespace

LoopholeMap loophole_map(std::span<const double> f_grid, std::span<const double> eta_grid,
                         const OptimizerOptions& options, unsigned threads) {
  require_increasing(f_grid, "f");
  require_increasing(eta_grid, "eta");
  if (!(eta_grid.front() > 0.0 && eta_grid.back() <= 1.0)) {
    throw std::invalid_argument("eta grid must lie in (0, 1]");
  }
  for (double f : f_grid) BiphotonState{f};

  LoopholeMap map;
  map.f_axis.assign(f_grid.begin(), f_grid.end());
  map.eta_axis.assign(eta_grid.begin(), eta_grid.end());
  map.contour_levels.assign(kLoopholeContours.begin(), kLoopholeContours.end());
  const std::size_t cells = f_grid.size() * eta_grid.size();
  map.ch_over_n.assign(cells, 0.0);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells && !failed; i = next++) {
      try {
        const BiphotonState state(f_grid[i / eta_grid.size()]);
        map.ch_over_n[i] = max_strict_ch_per_detection(state, eta_grid[i % eta_grid.size()], options);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return map;
}

ChCounts ch_counts(const BiphotonState& state, const ChConfiguration& config,
                   const RateModel& rate_model) {
  if (!(rate_model.acquisition > 0.0)) {
    throw std::invalid_argument("ch_counts: acquisition time must be positive");
  }
  if (!(rate_model.pair_rate >= 0.0) || !(rate_model.background_rate >= 0.0)) {
    throw std::invalid_argument("ch_counts: rates must be nonnegative");
  }
  const ChResult ch = ch_substituted(state, config);
  ChCounts out;
  double counts = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    out.term_rates[i] = rate_model.pair_rate * ch.terms[i] + rate_model.background_rate;
    out.rate += kChSigns[i] * out.term_rates[i];
    counts += out.term_rates[i] * rate_model.acquisition;
  }
  out.standard_error = std::sqrt(counts) / rate_model.acquisition;
  if (out.standard_error > 0.0) out.significance = out.rate / out.standard_error;
  return out;
}

}  // namespace biphoton::bell
