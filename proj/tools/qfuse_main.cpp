// qfuse command-line interface.
//
//   unwrap      invert one quantum signal sample against a classical reading
//   simulate    run a single navigation scenario and dump its time series
//   montecarlo  run repeated scenarios and aggregate error statistics
//   hist        single-shot fusion-error histogram over a uniform draw range

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qfuse/qfuse.hpp"

namespace {

qfuse::ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? qfuse::default_config() : qfuse::load_config_file(path);
}

qfuse::NoiseMode noise_mode_from(const std::string& text) {
  if (text == "none") return qfuse::NoiseMode::kNone;
  if (text == "acceleration") return qfuse::NoiseMode::kAccelerationDomain;
  return qfuse::NoiseMode::kSignalDomain;
}

qfuse::RunMode run_mode_from(const std::string& text) {
  if (text == "classical") return qfuse::RunMode::kClassicalOnly;
  if (text == "fused") return qfuse::RunMode::kFused;
  return qfuse::RunMode::kFusedQ2;
}

int run_unwrap(const std::string& config_path, double signal, double classical,
               const std::string& noise_mode, std::uint64_t seed) {
  qfuse::ExperimentConfig cfg = load_or_default(config_path);
  const auto& quantum = cfg.scenario.quantum;
  const auto mode = noise_mode_from(noise_mode);

  qfuse::UnwrapResult res = qfuse::unwrap(quantum, cfg.scenario.fusion, signal, classical);
  qfuse::RandomStream rng(seed, qfuse::kStreamQuantum);
  res = qfuse::apply_fusion_noise(quantum, res, mode, rng);
  res.converged =
      qfuse::convergence_check(res.a_out, res.a_f, cfg.scenario.fusion.convergence_epsilon);

  std::cout << "a_f = " << qfuse::format_double(res.a_f) << " m/s^2\n";
  std::cout << "branch: s=" << (res.branch.sign > 0 ? "+1" : "-1") << " n=" << res.branch.winding
            << "\n";
  std::cout << "residual = " << qfuse::format_double(res.residual) << " m/s^2\n";
  std::cout << "a_out = " << qfuse::format_double(res.a_out) << " m/s^2\n";
  std::cout << "converged: " << (res.converged ? "yes" : "no") << "\n";
  return 0;
}

int run_simulate(qfuse::ExperimentConfig cfg, const std::string& out_dir) {
  cfg.scenario.seed = qfuse::derive_seed(cfg.master_seed, 0);
  const qfuse::RunSeries series = qfuse::run_scenario(cfg.scenario);

  std::filesystem::create_directories(out_dir);
  qfuse::write_timeseries_csv(std::filesystem::path(out_dir) / "timeseries_run0.csv", series);
  qfuse::write_manifest(std::filesystem::path(out_dir) / "manifest", cfg);

  const std::size_t last = series.size() - 1;
  std::cout << "mode " << qfuse::to_string(cfg.scenario.mode) << ", " << series.size()
            << " ticks over " << qfuse::format_double(cfg.scenario.duration) << " s\n";
  std::cout << "final position error: " << qfuse::format_double(series.pos_err[last]) << " m\n";
  std::cout << "convergence failures: " << series.convergence_failures << "/"
            << series.quantum_updates << " quantum updates\n";
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "timeseries_run0.csv").string()
            << "\n";
  return 0;
}

int run_montecarlo(qfuse::ExperimentConfig cfg, const std::string& out_dir) {
  const qfuse::AggregateStats stats = qfuse::run_monte_carlo(cfg);
  qfuse::write_outputs(stats, cfg, out_dir);

  std::cout << stats.n_runs << " runs, mode " << qfuse::to_string(cfg.scenario.mode) << "\n";
  if (!stats.rows.empty()) {
    const auto& last = stats.rows.back();
    std::cout << "rmse at t=" << qfuse::format_double(last.t)
              << " s: accel " << qfuse::format_double(last.rmse_accel) << " m/s^2, position "
              << qfuse::format_double(last.rmse_pos) << " m\n";
  }
  std::cout << "convergence failure rate: "
            << qfuse::format_double(stats.convergence_failure_rate()) << "\n";
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "aggregate.csv").string() << "\n";
  return 0;
}

int run_hist(qfuse::ExperimentConfig cfg, const std::string& out_dir) {
  const qfuse::AggregateStats stats = qfuse::single_shot_histogram(cfg);
  qfuse::write_outputs(stats, cfg, out_dir);

  std::cout << stats.draws << " draws from U(" << qfuse::format_double(cfg.draw_min) << ", "
            << qfuse::format_double(cfg.draw_max) << "), noise mode "
            << qfuse::to_string(cfg.scenario.fusion.noise_mode) << "\n";
  std::cout << "error mean " << qfuse::format_double(stats.err_mean) << ", std "
            << qfuse::format_double(stats.err_std) << ", excess kurtosis "
            << qfuse::format_double(stats.err_excess_kurtosis) << "\n";
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "histogram.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfuse: quantum/classical accelerometer fusion simulator"};
  app.require_subcommand(1);

  const std::vector<std::string> noise_modes{"none", "acceleration", "signal"};
  const std::vector<std::string> run_modes{"classical", "fused", "fused-q2"};

  // unwrap
  auto* unwrap_cmd =
      app.add_subcommand("unwrap", "Invert one quantum sample against a classical reading");
  std::string u_config;
  double u_signal = 0.0;
  double u_classical = 0.0;
  std::string u_noise = "none";
  std::uint64_t u_seed = 1;
  unwrap_cmd->add_option("--signal", u_signal, "Quantum signal S (atom-count units)")
      ->required();
  unwrap_cmd->add_option("--classical", u_classical, "Classical acceleration reading, m/s^2")
      ->required();
  unwrap_cmd->add_option("--config", u_config, "Configuration file");
  unwrap_cmd->add_option("--noise-mode", u_noise, "Output noise model")
      ->check(CLI::IsMember(noise_modes));
  unwrap_cmd->add_option("--seed", u_seed, "Seed for the noisy modes");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run one scenario and dump its time series");
  std::string s_config, s_mode, s_out;
  std::uint64_t s_seed = 0;
  bool s_has_seed = false;
  sim_cmd->add_option("--config", s_config, "Configuration file");
  sim_cmd->add_option("--mode", s_mode, "Override scenario mode")->check(CLI::IsMember(run_modes));
  sim_cmd->add_option("--seed", s_seed, "Override master seed")->each([&](const std::string&) {
    s_has_seed = true;
  });
  sim_cmd->add_option("--out", s_out, "Output directory");

  // montecarlo
  auto* mc_cmd = app.add_subcommand("montecarlo", "Run repeated scenarios and aggregate errors");
  std::string m_config, m_mode, m_out;
  long m_runs = 0;
  std::uint64_t m_seed = 0;
  bool m_has_seed = false;
  int m_workers = -1;
  mc_cmd->add_option("--config", m_config, "Configuration file");
  mc_cmd->add_option("--runs", m_runs, "Number of Monte-Carlo runs")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", m_seed, "Override master seed")->each([&](const std::string&) {
    m_has_seed = true;
  });
  mc_cmd->add_option("--mode", m_mode, "Override scenario mode")->check(CLI::IsMember(run_modes));
  mc_cmd->add_option("--workers", m_workers, "Worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
  mc_cmd->add_option("--out", m_out, "Output directory");

  // hist
  auto* hist_cmd = app.add_subcommand("hist", "Single-shot fusion-error histogram");
  std::string h_config, h_noise, h_out;
  long h_runs = 0;
  double h_min = 0.0, h_max = 0.0;
  bool h_has_min = false, h_has_max = false;
  std::uint64_t h_seed = 0;
  bool h_has_seed = false;
  hist_cmd->add_option("--config", h_config, "Configuration file");
  hist_cmd->add_option("--runs", h_runs, "Number of draws")->check(CLI::PositiveNumber);
  hist_cmd->add_option("--range-min", h_min, "Lower edge of the uniform acceleration draw")
      ->each([&](const std::string&) { h_has_min = true; });
  hist_cmd->add_option("--range-max", h_max, "Upper edge of the uniform acceleration draw")
      ->each([&](const std::string&) { h_has_max = true; });
  hist_cmd->add_option("--noise-mode", h_noise, "Signal/output noise model")
      ->check(CLI::IsMember(noise_modes));
  hist_cmd->add_option("--seed", h_seed, "Override master seed")->each([&](const std::string&) {
    h_has_seed = true;
  });
  hist_cmd->add_option("--out", h_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (unwrap_cmd->parsed()) return run_unwrap(u_config, u_signal, u_classical, u_noise, u_seed);

    if (sim_cmd->parsed()) {
      qfuse::ExperimentConfig cfg = load_or_default(s_config);
      if (!s_mode.empty()) cfg.scenario.mode = run_mode_from(s_mode);
      if (s_has_seed) cfg.master_seed = s_seed;
      return run_simulate(cfg, s_out.empty() ? cfg.output_directory : s_out);
    }

    if (mc_cmd->parsed()) {
      qfuse::ExperimentConfig cfg = load_or_default(m_config);
      if (m_runs > 0) cfg.n_runs = m_runs;
      if (m_has_seed) cfg.master_seed = m_seed;
      if (!m_mode.empty()) cfg.scenario.mode = run_mode_from(m_mode);
      if (m_workers >= 0) cfg.workers = m_workers;
      return run_montecarlo(cfg, m_out.empty() ? cfg.output_directory : m_out);
    }

    qfuse::ExperimentConfig cfg = load_or_default(h_config);
    if (h_runs > 0) cfg.n_runs = h_runs;
    if (h_has_seed) cfg.master_seed = h_seed;
    if (h_has_min != h_has_max)
      throw qfuse::ConfigError("hist: --range-min and --range-max must be given together");
    if (h_has_min) {
      cfg.draw_min = h_min;
      cfg.draw_max = h_max;
      cfg.has_draw_range = true;
    }
    if (!h_noise.empty()) cfg.scenario.fusion.noise_mode = noise_mode_from(h_noise);
    cfg.validate();
    return run_hist(cfg, h_out.empty() ? cfg.output_directory : h_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
