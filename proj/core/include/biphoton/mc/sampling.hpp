#pragma once

#include <cstdint>
#include <span>

#include "biphoton/mc/rng.hpp"

namespace biphoton::mc {

/// Poisson(mean) draw.  mean == 0 returns 0; negative or non-finite mean
/// throws std::invalid_argument.
std::uint64_t poisson_sample(RngStream& rng, double mean);

/// Binomial(trials, p) draw; p must lie in [0, 1].
std::uint64_t binomial_sample(RngStream& rng, std::uint64_t trials, double p);

/// Index drawn from a discrete distribution with the given (not
/// necessarily normalized) nonnegative weights.
std::size_t categorical_sample(RngStream& rng, std::span<const double> weights);

}  // namespace biphoton::mc
