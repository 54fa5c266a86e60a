#include "biphoton/mc/information.hpp"

#include <cmath>
#include <stdexcept>

namespace biphoton::mc {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), counts_(rows * cols, 0) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("ContingencyTable: alphabets must be nonempty");
  }
}

void ContingencyTable::add(std::size_t row, std::size_t col, std::uint64_t n) {
  if (row >= rows_ || col >= cols_) {
    throw std::out_of_range("ContingencyTable::add: index out of range");
  }
  counts_[row * cols_ + col] += n;
  total_ += n;
}

void ContingencyTable::merge(const ContingencyTable& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("ContingencyTable::merge: shape mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::uint64_t ContingencyTable::at(std::size_t row, std::size_t col) const {
  return counts_.at(row * cols_ + col);
}

namespace {

struct Marginals {
  std::vector<double> row;
  std::vector<double> col;
};

Marginals marginals(const ContingencyTable& t) {
  Marginals m{std::vector<double>(t.rows(), 0.0), std::vector<double>(t.cols(), 0.0)};
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const auto n = static_cast<double>(t.at(r, c));
      m.row[r] += n;
      m.col[c] += n;
    }
  }
  return m;
}

void require_nonempty(const ContingencyTable& t) {
  if (t.total() == 0) {
    throw std::invalid_argument("mutual_information: empty table");
  }
}

}  // namespace

InformationEstimate mutual_information_estimate(const ContingencyTable& table) {
  require_nonempty(table);
  const auto m = marginals(table);
  const auto n = static_cast<double>(table.total());
  // i(r,c) = log2(n_rc * n / (n_r * n_c)); I = E[i], Var[I_hat] ~ Var[i] / n.
  double first = 0.0;
  double second = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const auto k = static_cast<double>(table.at(r, c));
      if (k == 0.0) continue;
      const double pointwise = std::log2(k * n / (m.row[r] * m.col[c]));
      first += k * pointwise;
      second += k * pointwise * pointwise;
    }
  }
  first /= n;
  second /= n;
  InformationEstimate est;
  est.bits = first > 0.0 ? first : 0.0;
  const double var = second - first * first;
  est.standard_error = var > 0.0 ? std::sqrt(var / n) : 0.0;
  return est;
}

double mutual_information(const ContingencyTable& table) {
  return mutual_information_estimate(table).bits;
}

double GuessingProbability::advantage() const {
  return prior >= 1.0 ? 0.0 : (with_side_information - prior) / (1.0 - prior);
}

GuessingProbability guessing_probability(const ContingencyTable& table) {
  require_nonempty(table);
  const auto m = marginals(table);
  const auto n = static_cast<double>(table.total());
  double correct = 0.0;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::uint64_t best = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.at(r, c) > best) best = table.at(r, c);
    }
    correct += static_cast<double>(best);
  }
  double prior = 0.0;
  for (double v : m.row) prior = v > prior ? v : prior;
  return {correct / n, prior / n};
}

double certainty_fraction(const ContingencyTable& table) {
  require_nonempty(table);
  std::uint64_t certain = 0;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::size_t nonzero = 0;
    std::uint64_t column_total = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.at(r, c) > 0) ++nonzero;
      column_total += table.at(r, c);
    }
    if (nonzero == 1) certain += column_total;
  }
  return static_cast<double>(certain) / static_cast<double>(table.total());
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace biphoton::mc
