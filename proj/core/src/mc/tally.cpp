#include "biphoton/mc/tally.hpp"

#include <cmath>
#include <utility>

namespace biphoton::mc {

void ExactSum::add(double x) {
  // Shewchuk's grow-expansion, as in CPython's math.fsum.
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
  for (double p : other.partials_) add(p);
}

double ExactSum::value() const {
  // Correctly rounded sum of the partials (CPython fsum tail).
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

void Tally::add(double x) {
  ++count_;
  sum_.add(x);
  sum_sq_.add(x * x);
}

void Tally::merge(const Tally& other) {
  count_ += other.count_;
  sum_.merge(other.sum_);
  sum_sq_.merge(other.sum_sq_);
}

double Tally::mean() const {
  return count_ == 0 ? 0.0 : sum() / static_cast<double>(count_);
}

double Tally::variance() const {
  if (count_ < 2) return 0.0;
  const double n = static_cast<double>(count_);
  const double m = mean();
  const double v = (sum_of_squares() - n * m * m) / (n - 1.0);
  return v > 0.0 ? v : 0.0;
}

double Tally::standard_error() const {
  return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

Tally merge(Tally a, const Tally& b) {
  a.merge(b);
  return a;
}

}  // namespace biphoton::mc
