#include "biphoton/mc/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace biphoton::mc {

std::uint64_t poisson_sample(RngStream& rng, double mean) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::invalid_argument("poisson_sample: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

std::uint64_t binomial_sample(RngStream& rng, std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial_sample: p must lie in [0, 1]");
  }
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(trials), p);
  return static_cast<std::uint64_t>(dist(rng));
}

std::size_t categorical_sample(RngStream& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("categorical_sample: weights must be finite and >= 0");
    }
    total += w;
  }
  if (weights.empty() || total <= 0.0) {
    throw std::invalid_argument("categorical_sample: empty or all-zero weights");
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace biphoton::mc
