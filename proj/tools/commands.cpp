#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "biphoton/error.hpp"
#include "biphoton/io.hpp"

namespace biphoton::cli {

namespace {

using io::format_double;
using io::write_row;

io::Metadata metadata(const ExperimentConfig& cfg, std::string command) {
  return {std::move(command), cfg.seed(), cfg.hash()};
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// Quote a free-text CSV cell.
std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

void ch_scan(const ExperimentConfig& cfg, std::ostream& out) {
  const auto state = cfg.state();
  const auto c = cfg.ch_configuration();
  const auto steps = cfg.integer("analyzers", "scan_steps");
  if (steps < 4) throw ConfigError("config: analyzers.scan_steps must be >= 4");
  const auto fixed = c.analyzers[0].at(cfg.number("analyzers", "fixed_angle"));
  const auto movable = c.analyzers[1].at(0.0);
  const double v = fringe_visibility(state, fixed, static_cast<std::size_t>(steps), movable);

  io::write_metadata(out, metadata(cfg, "ch-scan"));
  out << "# visibility=" << format_double(v) << '\n';
  out << "angle_deg,coincidence_prob\n";
  for (std::int64_t i = 0; i < steps; ++i) {
    const double angle = 180.0 * static_cast<double>(i) / static_cast<double>(steps);
    const double p = coincidence_prob(state, fixed, c.analyzers[1].at(angle));
    write_row(out, {format_double(angle), format_double(p)});
  }
}

void ch_optimize(const ExperimentConfig& cfg, std::ostream& out) {
  const auto state = cfg.state();
  const auto c = cfg.ch_configuration();
  const auto form = cfg.ch_form();
  const auto opt = bell::ch_optimize(state, c.efficiency, c.analyzers, form, cfg.optimizer());
  const bool violation = opt.result.value > 1e-12;

  io::write_metadata(out, metadata(cfg, "ch-optimize"));
  out << "form,f_re,f_im,theta1,theta2,theta1p,theta2p,ch,coarse_grid_value,verdict\n";
  write_row(out, {std::string(bell::to_string(form)), format_double(state.f().real()),
                  format_double(state.f().imag()), format_double(opt.config.theta1),
                  format_double(opt.config.theta2), format_double(opt.config.theta1p),
                  format_double(opt.config.theta2p), format_double(opt.result.value),
                  format_double(opt.coarse_grid_value), violation ? "violation" : "no violation"});
}

void loophole_map(const ExperimentConfig& cfg, std::ostream& out) {
  const auto f = cfg.loophole_f_grid();
  const auto eta = cfg.loophole_eta_grid();
  const auto threads = cfg.integer("bell", "threads");
  if (threads < 0) throw ConfigError("config: bell.threads must be >= 0");
  const auto map = bell::loophole_map(f, eta, cfg.optimizer(), static_cast<unsigned>(threads));
  io::write_loophole_csv(out, map, metadata(cfg, "loophole-map"));
}

void casado(const ExperimentConfig& cfg, std::ostream& out) {
  const auto p = cfg.casado();
  const auto bound = lhv::casado_rate_bound(p);
  const auto r = lhv::exclusion_verdict(p, cfg.number("casado", "singles_rate"),
                                        cfg.number("casado", "visibility"),
                                        cfg.flag("casado", "ch_positive"), cfg.verdict_options());
  io::write_metadata(out, metadata(cfg, "casado"));
  out << "verdict,absorption_time_s,bound_at_1s,bound_degenerate,singles_rate,visibility,"
         "ch_positive,rationale\n";
  write_row(out, {std::string(lhv::to_string(r.verdict)), format_double(r.absorption_time),
                  format_double(bound.value), yes_no(bound.degenerate),
                  format_double(r.singles_rate), format_double(r.visibility),
                  yes_no(r.ch_positive), quoted(r.rationale)});
}

void calibrate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto base = cfg.calibration();
  const auto seeds = cfg.integer("calibration", "seeds");
  if (seeds < 1) throw ConfigError("config: calibration.seeds must be >= 1");

  io::write_metadata(out, metadata(cfg, "calibrate"));
  out << "seed,eta1_true,eta1_hat,stderr,N1,N2,Nc,accidental,status\n";
  for (std::int64_t k = 0; k < seeds; ++k) {
    auto s = base;
    s.seed = base.seed + static_cast<std::uint64_t>(k);
    try {
      const auto r = calibration::simulate_calibration(s);
      write_row(out, {std::to_string(s.seed), format_double(s.eta1), format_double(r.eta_hat),
                      format_double(r.standard_error), std::to_string(r.raw.n1),
                      std::to_string(r.raw.n2), std::to_string(r.raw.nc),
                      format_double(r.raw.accidental), "ok"});
    } catch (const EstimationError&) {
      write_row(out, {std::to_string(s.seed), format_double(s.eta1), "", "", "", "", "", "",
                      "estimation_failure"});
    }
  }
  const std::vector<calibration::CalibrationScenario> grid{base};
  const auto row = calibration::estimator_bias_scan(grid, static_cast<std::size_t>(seeds)).front();
  out << "# mean_estimate=" << format_double(row.mean_estimate)
      << " bias=" << format_double(row.bias) << " bias_stderr=" << format_double(row.bias_stderr)
      << " coverage_2sigma=" << format_double(row.coverage_2sigma)
      << " failures=" << row.failures << '\n';
}

void double_slit(const ExperimentConfig& cfg, const DoubleSlitOptions& opt, std::ostream& out) {
  const auto g = cfg.slit_geometry();
  auto p1 = cfg.plane(1);
  auto p2 = cfg.plane(2);
  const std::string command = "double-slit " + opt.mode;

  if (opt.mode == "sqm" || opt.mode == "dbb") {
    const bool dbb = opt.mode == "dbb";
    if (opt.query) {
      io::write_metadata(out, metadata(cfg, command));
      const auto [x1, x2] = *opt.query;
      const double d = dbb ? double_slit::dbb_density(g, p1, x1, p2, x2)
                           : double_slit::sqm_density(g, p1, x1, p2, x2);
      out << "x1,x2,density\n";
      write_row(out, {format_double(x1), format_double(x2), format_double(d)});
      return;
    }
    const auto pattern = dbb ? double_slit::dbb_joint_pattern(g, p1, p2)
                             : double_slit::sqm_joint_pattern(g, p1, p2);
    io::write_pattern_csv(out, pattern, metadata(cfg, command));
    if (!opt.marginals_path.empty()) {
      auto f = open_output(opt.marginals_path);
      io::write_marginals_csv(f, pattern, metadata(cfg, command));
    }
    return;
  }
  if (opt.mode != "chi2") throw ConfigError("double-slit: mode must be sqm, dbb or chi2");

  const double fixed_x = cfg.number("double_slit", "fixed_x2");
  double_slit::CountData data;
  if (!opt.data_path.empty()) {
    std::ifstream in(opt.data_path);
    if (!in) throw ConfigError("cannot open '" + opt.data_path + "'");
    data = io::read_count_csv(in);
  } else {
    const auto n = cfg.integer("double_slit", "chi2_points");
    if (n < 1) throw ConfigError("config: double_slit.chi2_points must be >= 1");
    p1.positions.clear();
    for (std::int64_t i = 0; i < n; ++i) {
      p1.positions.push_back(cfg.number("double_slit", "chi2_x1_min") +
                             static_cast<double>(i) * cfg.number("double_slit", "chi2_x1_step"));
    }
    data = double_slit::synthetic_counts(g, p1, p2, fixed_x, cfg.number("double_slit", "peak_counts"),
                                         cfg.seed());
  }
  std::vector<double> model;
  for (double x : data.position) model.push_back(double_slit::sqm_density(g, p1, x, p2, fixed_x));

  const bool bg = cfg.flag("double_slit", "fit_background");
  const auto sqm = double_slit::chi_square_compare(data, std::span<const double>(model), {bg, false});
  const auto lin = double_slit::chi_square_compare(data, std::nullopt, {true, true});

  io::write_metadata(out, metadata(cfg, command));
  out << "model,chi2,dof,reduced_chi2\n";
  write_row(out, {"sqm", format_double(sqm.chi2), std::to_string(sqm.dof), format_double(sqm.reduced)});
  write_row(out, {"linear", format_double(lin.chi2), std::to_string(lin.dof), format_double(lin.reduced)});
}

namespace {

void report_header(std::ostream& out) {
  out << "channel,eve,eve_target,intercept_fraction,rounds,post_selected,sifted,sifted_rate,"
         "qber,qber_stderr,symbol_error_rate,symbol_error_stderr,mi_symbol,mi_polarization,"
         "mi_phase,p_full_symbol,guess_advantage,keys_identical,empty_sift\n";
}

void report_row(std::ostream& out, const qkd::ChannelReport& r) {
  write_row(out, {std::string(qkd::to_string(r.channel)), std::string(qkd::to_string(r.eve.kind)),
                  std::string(qkd::to_string(r.eve.target)), format_double(r.eve.intercept_fraction),
                  std::to_string(r.rounds), std::to_string(r.post_selected),
                  std::to_string(r.sifted), format_double(r.sifted_rate.value),
                  format_double(r.qber.value), format_double(r.qber.standard_error),
                  format_double(r.symbol_error_rate.value),
                  format_double(r.symbol_error_rate.standard_error),
                  format_double(r.mi_symbol.value), format_double(r.mi_polarization.value),
                  r.mi_phase ? format_double(r.mi_phase->value) : "",
                  format_double(r.p_full_symbol.value), format_double(r.guess.advantage.value),
                  yes_no(r.keys_identical), yes_no(r.empty_sift)});
}

}  // namespace

void qkd(const ExperimentConfig& cfg, const QkdOptions& opt, std::ostream& out) {
  const auto rounds_i = cfg.integer("qkd", "rounds");
  if (rounds_i < 1) throw ConfigError("config: qkd.rounds must be >= 1");
  const auto rounds = static_cast<std::uint64_t>(rounds_i);
  const auto seed = cfg.seed();
  const auto state = cfg.qkd_state();
  const auto channel = cfg.qkd_channel();
  const auto eve = cfg.qkd_eve();
  const std::string command = "qkd " + opt.mode;

  if (opt.mode == "run") {
    std::vector<qkd::RoundRecord> transcript;
    const auto run = qkd::run_protocol(state, channel, rounds, eve, seed, {},
                                       opt.transcript_path.empty() ? nullptr : &transcript);
    if (!opt.transcript_path.empty()) {
      auto f = open_output(opt.transcript_path);
      io::write_transcript(f, transcript);
    }
    io::write_metadata(out, metadata(cfg, command));
    report_header(out);
    report_row(out, run.report);
    return;
  }
  if (opt.mode == "eve-sweep") {
    const auto fractions = cfg.numbers("qkd", "sweep_fractions");
    const auto reports = qkd::eve_sweep(state, channel, eve.kind, eve.target, fractions, rounds, seed);
    io::write_metadata(out, metadata(cfg, command));
    report_header(out);
    for (const auto& r : reports) report_row(out, r);
    return;
  }
  if (opt.mode != "ratio") throw ConfigError("qkd: mode must be run, eve-sweep or ratio");

  std::vector<qkd::EveKind> kinds{qkd::EveKind::fixed_basis, qkd::EveKind::breidbart};
  if (eve.kind != qkd::EveKind::none) kinds = {eve.kind};
  std::vector<qkd::InformationMetric> metrics{qkd::InformationMetric::mutual_information,
                                              qkd::InformationMetric::full_symbol_guess,
                                              qkd::InformationMetric::full_symbol_certainty};
  if (cfg.text("qkd", "metric") != "all") metrics = {cfg.qkd_metric()};
  const double target = cfg.number("qkd", "information_target");

  io::write_metadata(out, metadata(cfg, command));
  out << "eve,metric,target,reachable,eta_single,eta_double,error_single,error_double,ratio,"
         "ratio_stderr,significance,reference_ratio,note\n";
  for (auto k : kinds) {
    for (auto m : metrics) {
      const auto r = qkd::disturbance_ratio(k, m, target, rounds, seed);
      write_row(out, {std::string(qkd::to_string(k)), std::string(qkd::to_string(m)),
                      format_double(target), yes_no(r.reachable), format_double(r.eta_single),
                      format_double(r.eta_double), format_double(r.error_single.value),
                      format_double(r.error_double.value), format_double(r.ratio.value),
                      format_double(r.ratio.standard_error), format_double(r.significance),
                      format_double(r.reference_ratio), quoted(r.note)});
    }
  }
}

}  // namespace biphoton::cli
