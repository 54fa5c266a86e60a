#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "biphoton/error.hpp"
#include "biphoton/io.hpp"
#include "commands.hpp"

namespace {

using namespace biphoton;

std::pair<double, double> parse_query(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("--query expects x1,x2 in meters");
  try {
    std::size_t used1 = 0, used2 = 0;
    const double x1 = std::stod(s.substr(0, comma), &used1);
    const double x2 = std::stod(s.substr(comma + 1), &used2);
    if (used1 != comma || used2 != s.size() - comma - 1) throw std::invalid_argument(s);
    return {x1, x2};
  } catch (const std::logic_error&) {
    throw ConfigError("--query expects x1,x2 in meters, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled-photon experiment simulator.\n\n"
               "Units: meters, seconds, degrees for analyzer angles, radians for phases.\n"
               "Configuration keys (section.key = default):\n" +
               cli::ExperimentConfig::describe()};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_path;
  app.add_option("-c,--config", config_path, "JSON experiment configuration");
  app.add_option("--set", overrides, "Override a key: section.key=value (repeatable)");
  app.add_option("-o,--output", output_path, "Write CSV here instead of stdout");

  auto* scan = app.add_subcommand("ch-scan", "Coincidence fringe vs the second analyzer angle");
  auto* optimize = app.add_subcommand("ch-optimize", "Maximize the CH sum over analyzer angles");
  auto* map = app.add_subcommand("loophole-map", "Maximized strict CH per detection over (f, eta)");
  auto* casado = app.add_subcommand("casado", "Local-realistic rate bound and exclusion verdict");
  auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo detector calibration");

  cli::DoubleSlitOptions ds;
  std::string query;
  auto* slit = app.add_subcommand("double-slit", "Two-photon double-slit patterns and fits");
  slit->add_option("--mode", ds.mode, "sqm | dbb | chi2")
      ->check(CLI::IsMember({"sqm", "dbb", "chi2"}));
  slit->add_option("--query", query, "Single point x1,x2 (m) instead of the grid");
  slit->add_option("--data", ds.data_path, "CSV of position,counts,stderr for chi2");
  slit->add_option("--marginals", ds.marginals_path, "Also write marginals CSV here");

  cli::QkdOptions qo;
  auto* qkd = app.add_subcommand("qkd", "Time-bin x polarization key distribution");
  qkd->add_option("mode", qo.mode, "run | eve-sweep | ratio")
      ->check(CLI::IsMember({"run", "eve-sweep", "ratio"}));
  qkd->add_option("--transcript", qo.transcript_path, "JSON-lines transcript (run only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    cli::ExperimentConfig cfg;
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& s : overrides) cfg.set(s);
    if (!query.empty()) ds.query = parse_query(query);

    std::ostringstream buffer;
    if (*scan) cli::ch_scan(cfg, buffer);
    else if (*optimize) cli::ch_optimize(cfg, buffer);
    else if (*map) cli::loophole_map(cfg, buffer);
    else if (*casado) cli::casado(cfg, buffer);
    else if (*calibrate) cli::calibrate(cfg, buffer);
    else if (*slit) cli::double_slit(cfg, ds, buffer);
    else if (*qkd) cli::qkd(cfg, qo, buffer);

    if (output_path.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream f(output_path, std::ios::binary);
      if (!f) throw ConfigError("cannot open '" + output_path + "' for writing");
      f << buffer.str();
    }
    return cli::kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitRuntime;
  }
}
