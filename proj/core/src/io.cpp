#include "biphoton/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biphoton::io {

std::uint64_t fnv1a_64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.config_hash));
  out << "# biphoton " << kVersion << '\n'
      << "# command=" << meta.command << '\n'
      << "# seed=" << meta.seed << '\n'
      << "# config_hash=" << hash << '\n';
}

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void write_loophole_csv(std::ostream& out, const bell::LoopholeMap& map, const Metadata& meta) {
  write_metadata(out, meta);
  out << "# contour_levels=";
  for (std::size_t i = 0; i < map.contour_levels.size(); ++i) {
    out << (i ? ";" : "") << format_double(map.contour_levels[i]);
  }
  out << '\n';
  std::vector<std::string> row{"f\\eta"};
  for (double e : map.eta_axis) row.push_back(format_double(e));
  write_row(out, row);
  for (std::size_t i = 0; i < map.f_axis.size(); ++i) {
    row.assign({format_double(map.f_axis[i])});
    for (std::size_t j = 0; j < map.eta_axis.size(); ++j) row.push_back(format_double(map.at(i, j)));
    write_row(out, row);
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

double to_double(const std::string& s) {
  double v = 0.0;
  if (!parse_double(s, v)) throw std::runtime_error("csv: not a number: '" + s + "'");
  return v;
}

}  // namespace

bell::LoopholeMap read_loophole_csv(std::istream& in) {
  bell::LoopholeMap map;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# contour_levels=";
      if (line.rfind(key, 0) == 0) {
        std::stringstream ss(line.substr(key.size()));
        std::string v;
        while (std::getline(ss, v, ';')) map.contour_levels.push_back(to_double(v));
      }
      continue;
    }
    const auto cells = split(line);
    if (!header) {
      for (std::size_t j = 1; j < cells.size(); ++j) map.eta_axis.push_back(to_double(cells[j]));
      header = true;
      continue;
    }
    if (cells.size() != map.eta_axis.size() + 1) throw std::runtime_error("csv: ragged row");
    map.f_axis.push_back(to_double(cells[0]));
    for (std::size_t j = 1; j < cells.size(); ++j) map.ch_over_n.push_back(to_double(cells[j]));
  }
  if (!header || map.f_axis.empty()) throw std::runtime_error("csv: empty loophole map");
  return map;
}

std::vector<double> zero_contour(const bell::LoopholeMap& map) {
  std::vector<double> out;
  const std::size_t ne = map.eta_axis.size();
  for (std::size_t i = 0; i < map.f_axis.size(); ++i) {
    double crossing = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < ne; ++j) {
      const double v = map.at(i, j);
      if (v < 0.0) continue;
      if (j == 0) {
        crossing = map.eta_axis[0];
      } else {
        const double u = map.at(i, j - 1);
        const double t = u / (u - v);
        crossing = map.eta_axis[j - 1] + t * (map.eta_axis[j] - map.eta_axis[j - 1]);
      }
      break;
    }
    out.push_back(crossing);
  }
  return out;
}

void write_pattern_csv(std::ostream& out, const double_slit::JointPattern& p,
                       const Metadata& meta) {
  write_metadata(out, meta);
  out << "x1,x2,density\n";
  for (std::size_t i = 0; i < p.x1.size(); ++i) {
    for (std::size_t j = 0; j < p.x2.size(); ++j) {
      write_row(out, {format_double(p.x1[i]), format_double(p.x2[j]), format_double(p.at(i, j))});
    }
  }
}

void write_marginals_csv(std::ostream& out, const double_slit::JointPattern& p,
                         const Metadata& meta) {
  write_metadata(out, meta);
  out << "plane,x,density\n";
  for (std::size_t i = 0; i < p.x1.size(); ++i) {
    write_row(out, {"1", format_double(p.x1[i]), format_double(p.marginal1[i])});
  }
  for (std::size_t j = 0; j < p.x2.size(); ++j) {
    write_row(out, {"2", format_double(p.x2[j]), format_double(p.marginal2[j])});
  }
}

double_slit::CountData read_count_csv(std::istream& in) {
  double_slit::CountData d;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    double probe = 0.0;
    if (first && !cells.empty() && !parse_double(cells[0], probe)) {
      first = false;
      continue;
    }
    first = false;
    if (cells.size() != 3) throw std::runtime_error("csv: expected position,counts,stderr");
    d.position.push_back(to_double(cells[0]));
    d.counts.push_back(to_double(cells[1]));
    d.uncertainty.push_back(to_double(cells[2]));
  }
  return d;
}

void write_transcript(std::ostream& out, const std::vector<qkd::RoundRecord>& records) {
  for (const auto& r : records) {
    const auto opt = [](int v) { return v < 0 ? nlohmann::json(nullptr) : nlohmann::json(v); };
    nlohmann::json j{
        {"round", r.round},
        {"alice", {{"pol_basis", r.alice_pol_basis}, {"phase_setting", r.alice_phase_setting},
                   {"pol", opt(r.alice_pol)}, {"phase", opt(r.alice_phase)}}},
        {"bob", {{"pol_basis", r.bob_pol_basis}, {"phase_setting", r.bob_phase_setting},
                 {"pol", opt(r.bob_pol)}, {"phase", opt(r.bob_phase)}}},
        {"central", r.central},
        {"eve", {{"attacked", r.eve_attacked}, {"pol", opt(r.eve_pol)}, {"phase", opt(r.eve_phase)}}},
        {"sifted", r.sifted},
    };
    out << j.dump() << '\n';
  }
}

}  // namespace biphoton::io
