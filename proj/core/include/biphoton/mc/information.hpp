#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace biphoton::mc {

/// Dense joint count table over two finite alphabets.
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols);

  void add(std::size_t row, std::size_t col, std::uint64_t n = 1);
  void merge(const ContingencyTable& other);

  std::uint64_t at(std::size_t row, std::size_t col) const;
  std::uint64_t total() const noexcept { return total_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Plug-in mutual information estimate with its delta-method standard error.
struct InformationEstimate {
  double bits = 0.0;
  double standard_error = 0.0;
};

/// Plug-in Shannon mutual information (bits) of the empirical joint.
/// Throws std::invalid_argument on an empty table.
double mutual_information(const ContingencyTable& table);
InformationEstimate mutual_information_estimate(const ContingencyTable& table);

/// Probability that the MAP guess of the row given the column is correct,
/// and the same guess made without the column (the largest row marginal).
struct GuessingProbability {
  double with_side_information = 0.0;
  double prior = 0.0;
  /// (with - prior) / (1 - prior); 0 when prior == 1.
  double advantage() const;
};
GuessingProbability guessing_probability(const ContingencyTable& table);

/// Fraction of samples whose column has a single nonzero row, i.e. the
/// column determines the row with certainty in the empirical joint.
double certainty_fraction(const ContingencyTable& table);

/// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace biphoton::mc
