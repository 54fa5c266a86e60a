#pragma once

#include <cstdint>
#include <vector>

namespace biphoton::mc {

/// Exact floating-point accumulator (Shewchuk non-overlapping partials).
///
/// The represented value is the exact real sum of every added double, so
/// merging is associative and commutative; value() is the correctly rounded
/// result and does not depend on the order of additions or merges.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  double value() const;

  friend bool operator==(const ExactSum& a, const ExactSum& b) {
    return a.value() == b.value();
  }

 private:
  std::vector<double> partials_;
};

/// Count / sum / sum-of-squares accumulator for one tracked statistic.
class Tally {
 public:
  void add(double x);
  void merge(const Tally& other);

  std::uint64_t count() const noexcept { return count_; }
  double sum() const { return sum_.value(); }
  double sum_of_squares() const { return sum_sq_.value(); }

  double mean() const;
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  /// Standard error of the mean.
  double standard_error() const;

  friend bool operator==(const Tally& a, const Tally& b) {
    return a.count_ == b.count_ && a.sum_ == b.sum_ && a.sum_sq_ == b.sum_sq_;
  }

 private:
  std::uint64_t count_ = 0;
  ExactSum sum_;
  ExactSum sum_sq_;
};

Tally merge(Tally a, const Tally& b);

}  // namespace biphoton::mc
