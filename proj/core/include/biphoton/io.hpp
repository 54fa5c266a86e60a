#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/bell.hpp"
#include "biphoton/double_slit.hpp"
#include "biphoton/qkd.hpp"

namespace biphoton::io {

inline constexpr std::string_view kVersion = "1.0.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a_64(std::string_view bytes) noexcept;

/// '#'-prefixed lines written at the top of every CSV.
struct Metadata {
  std::string command;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};
void write_metadata(std::ostream& out, const Metadata& meta);

/// Shortest decimal that round-trips the double ("%.17g" fallback free).
std::string format_double(double x);

/// Comma-joined row terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

/// Header row "f\eta,eta_0,...", then one row per f.  A '#' line lists the
/// contour levels.
void write_loophole_csv(std::ostream& out, const bell::LoopholeMap& map, const Metadata& meta);
/// Inverse of write_loophole_csv (metadata lines skipped).  Throws
/// std::runtime_error on malformed input.
bell::LoopholeMap read_loophole_csv(std::istream& in);

/// Per f row, the first eta (linearly interpolated) where the cell value
/// reaches zero; NaN when no cell of the row is nonnegative.
std::vector<double> zero_contour(const bell::LoopholeMap& map);

/// Rows x1,x2,density.
void write_pattern_csv(std::ostream& out, const double_slit::JointPattern& p,
                       const Metadata& meta);
/// Rows plane,x,density for both marginals.
void write_marginals_csv(std::ostream& out, const double_slit::JointPattern& p,
                         const Metadata& meta);

/// Reads position,counts,stderr rows; '#' lines and a non-numeric header
/// are skipped.  Throws std::runtime_error on malformed rows.
double_slit::CountData read_count_csv(std::istream& in);

/// One JSON object per line.
void write_transcript(std::ostream& out, const std::vector<qkd::RoundRecord>& records);

}  // namespace biphoton::io
