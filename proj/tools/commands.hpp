#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace biphoton::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

void ch_scan(const ExperimentConfig& cfg, std::ostream& out);
void ch_optimize(const ExperimentConfig& cfg, std::ostream& out);
void loophole_map(const ExperimentConfig& cfg, std::ostream& out);
void casado(const ExperimentConfig& cfg, std::ostream& out);
void calibrate(const ExperimentConfig& cfg, std::ostream& out);

struct DoubleSlitOptions {
  std::string mode = "sqm";  ///< sqm | dbb | chi2
  std::optional<std::pair<double, double>> query;
  std::string data_path;       ///< chi2 input; synthetic data when empty
  std::string marginals_path;  ///< optional second CSV for sqm/dbb
};
void double_slit(const ExperimentConfig& cfg, const DoubleSlitOptions& opt, std::ostream& out);

struct QkdOptions {
  std::string mode = "run";  ///< run | eve-sweep | ratio
  std::string transcript_path;
};
void qkd(const ExperimentConfig& cfg, const QkdOptions& opt, std::ostream& out);

}  // namespace biphoton::cli
