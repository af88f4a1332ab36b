// Sectioned key = value configuration files.
//
// An empty file yields the full default configuration; every key is
// optional and overrides one field. Unknown sections or keys are errors,
// as are malformed values, each reported with its line number. After
// parsing, derived fields are resolved (quantum sample period from the
// quantum rate, the convergence epsilon default of 4*sigma_f, the
// automatic aggregation stride) so that a serialized configuration
// re-parses to the identical experiment.

#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qfuse/harness.hpp"

namespace qfuse {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void config_fail(std::string_view name, int line, const std::string& what) {
  throw ConfigError(std::string(name) + ":" + std::to_string(line) + ": " + what);
}

inline double parse_number(std::string_view value, std::string_view name, int line) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    config_fail(name, line, "invalid number '" + std::string(value) + "'");
  return out;
}

inline long parse_integer(std::string_view value, std::string_view name, int line) {
  long out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    config_fail(name, line, "invalid integer '" + std::string(value) + "'");
  return out;
}

inline std::uint64_t parse_seed(std::string_view value, std::string_view name, int line) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    config_fail(name, line, "invalid seed '" + std::string(value) + "'");
  return out;
}

inline NoiseMode parse_noise_mode(std::string_view value, std::string_view name, int line) {
  if (value == "none") return NoiseMode::kNone;
  if (value == "acceleration") return NoiseMode::kAccelerationDomain;
  if (value == "signal") return NoiseMode::kSignalDomain;
  config_fail(name, line,
              "invalid noise_mode '" + std::string(value) + "' (none|acceleration|signal)");
}

inline RunMode parse_run_mode(std::string_view value, std::string_view name, int line) {
  if (value == "classical") return RunMode::kClassicalOnly;
  if (value == "fused") return RunMode::kFused;
  if (value == "fused-q2") return RunMode::kFusedQ2;
  config_fail(name, line, "invalid mode '" + std::string(value) + "' (classical|fused|fused-q2)");
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Fills derived fields after all keys are applied.
inline void resolve_config(ExperimentConfig& cfg) {
  ScenarioConfig& sc = cfg.scenario;
  if (sc.quantum_rate > 0.0) sc.quantum.sample_period = 1.0 / sc.quantum_rate;
  sc.classical.sample_rate = sc.classical_rate;
  if (sc.fusion.convergence_epsilon <= 0.0)
    sc.fusion.convergence_epsilon = 4.0 * shot_noise_sigma(sc.quantum);
  if (cfg.aggregate_stride == 0) cfg.aggregate_stride = cfg.resolved_stride();
}

inline ExperimentConfig default_config() {
  ExperimentConfig cfg;
  resolve_config(cfg);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(std::string_view text, std::string_view name = "config") {
  ExperimentConfig cfg;
  bool saw_draw_min = false;
  bool saw_draw_max = false;

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') detail::config_fail(name, line_no, "unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "quantum" && section != "classical" && section != "fusion" &&
          section != "scenario" && section != "experiment")
        detail::config_fail(name, line_no, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      detail::config_fail(name, line_no, "expected 'key = value'");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) detail::config_fail(name, line_no, "empty key");
    if (value.empty()) detail::config_fail(name, line_no, "empty value for '" + key + "'");
    if (section.empty())
      detail::config_fail(name, line_no, "key '" + key + "' outside any section");

    auto number = [&] { return detail::parse_number(value, name, line_no); };
    auto integer = [&] { return detail::parse_integer(value, name, line_no); };

    if (section == "quantum") {
      if (key == "n_atoms") cfg.scenario.quantum.n_atoms = number();
      else if (key == "wavelength") cfg.scenario.quantum.wavelength = number();
      else if (key == "half_interrogation") cfg.scenario.quantum.half_interrogation = number();
      else if (key == "pulse_width") cfg.scenario.quantum.pulse_width = number();
      else if (key == "initial_phase") cfg.scenario.quantum.initial_phase = number();
      else detail::config_fail(name, line_no, "unknown key '" + key + "' in section [quantum]");
    } else if (section == "classical") {
      if (key == "constant_bias") cfg.scenario.classical.constant_bias = number();
      else if (key == "sigma_white") cfg.scenario.classical.sigma_white = number();
      else if (key == "sigma_bias_offset") cfg.scenario.classical.sigma_bias_offset = number();
      else if (key == "gm_time_constant") cfg.scenario.classical.gm_time_constant = number();
      else if (key == "sigma_bias_drift") cfg.scenario.classical.sigma_bias_drift = number();
      else detail::config_fail(name, line_no, "unknown key '" + key + "' in section [classical]");
    } else if (section == "fusion") {
      if (key == "window_halfwidth") {
        const long w = integer();
        if (w < 1) detail::config_fail(name, line_no, "window_halfwidth must be >= 1");
        cfg.scenario.fusion.window_halfwidth = static_cast<int>(w);
      } else if (key == "convergence_epsilon") {
        const double eps = number();
        if (eps < 0.0)
          detail::config_fail(name, line_no, "convergence_epsilon must be >= 0 (0 = 4*sigma_f)");
        cfg.scenario.fusion.convergence_epsilon = eps;
      } else if (key == "noise_mode") {
        cfg.scenario.fusion.noise_mode = detail::parse_noise_mode(value, name, line_no);
      } else {
        detail::config_fail(name, line_no, "unknown key '" + key + "' in section [fusion]");
      }
    } else if (section == "scenario") {
      if (key == "duration") cfg.scenario.duration = number();
      else if (key == "classical_rate") cfg.scenario.classical_rate = number();
      else if (key == "quantum_rate") cfg.scenario.quantum_rate = number();
      else if (key == "sigma_truth") cfg.scenario.sigma_truth = number();
      else if (key == "truth_lowpass_tau") cfg.scenario.truth_lowpass_tau = number();
      else if (key == "mode") cfg.scenario.mode = detail::parse_run_mode(value, name, line_no);
      else detail::config_fail(name, line_no, "unknown key '" + key + "' in section [scenario]");
    } else {  // experiment
      if (key == "runs") cfg.n_runs = integer();
      else if (key == "master_seed") cfg.master_seed = detail::parse_seed(value, name, line_no);
      else if (key == "histogram_bins") cfg.histogram_bins = static_cast<int>(integer());
      else if (key == "draw_min") { cfg.draw_min = number(); saw_draw_min = true; }
      else if (key == "draw_max") { cfg.draw_max = number(); saw_draw_max = true; }
      else if (key == "aggregate_stride") cfg.aggregate_stride = integer();
      else if (key == "save_series") cfg.save_series = static_cast<int>(integer());
      else detail::config_fail(name, line_no, "unknown key '" + key + "' in section [experiment]");
    }
  }

  if (saw_draw_min != saw_draw_max)
    throw ConfigError(std::string(name) + ": draw_min and draw_max must be set together");
  cfg.has_draw_range = saw_draw_min;

  resolve_config(cfg);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

// Full resolved configuration in the same format parse_config reads.
// Output location and worker count are runtime parameters, not part of
// the experiment, and are deliberately absent.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  using detail::format_number;
  std::ostringstream out;
  out << "# qfuse resolved experiment configuration\n";
  out << "[quantum]\n";
  out << "n_atoms = " << format_number(cfg.scenario.quantum.n_atoms) << "\n";
  out << "wavelength = " << format_number(cfg.scenario.quantum.wavelength) << "\n";
  out << "half_interrogation = " << format_number(cfg.scenario.quantum.half_interrogation)
      << "\n";
  out << "pulse_width = " << format_number(cfg.scenario.quantum.pulse_width) << "\n";
  out << "initial_phase = " << format_number(cfg.scenario.quantum.initial_phase) << "\n";
  out << "\n[classical]\n";
  out << "constant_bias = " << format_number(cfg.scenario.classical.constant_bias) << "\n";
  out << "sigma_white = " << format_number(cfg.scenario.classical.sigma_white) << "\n";
  out << "sigma_bias_offset = " << format_number(cfg.scenario.classical.sigma_bias_offset)
      << "\n";
  out << "gm_time_constant = " << format_number(cfg.scenario.classical.gm_time_constant) << "\n";
  out << "sigma_bias_drift = " << format_number(cfg.scenario.classical.sigma_bias_drift) << "\n";
  out << "\n[fusion]\n";
  out << "window_halfwidth = " << cfg.scenario.fusion.window_halfwidth << "\n";
  out << "convergence_epsilon = " << format_number(cfg.scenario.fusion.convergence_epsilon)
      << "\n";
  out << "noise_mode = " << to_string(cfg.scenario.fusion.noise_mode) << "\n";
  out << "\n[scenario]\n";
  out << "duration = " << format_number(cfg.scenario.duration) << "\n";
  out << "classical_rate = " << format_number(cfg.scenario.classical_rate) << "\n";
  out << "quantum_rate = " << format_number(cfg.scenario.quantum_rate) << "\n";
  out << "sigma_truth = " << format_number(cfg.scenario.sigma_truth) << "\n";
  out << "truth_lowpass_tau = " << format_number(cfg.scenario.truth_lowpass_tau) << "\n";
  out << "mode = " << to_string(cfg.scenario.mode) << "\n";
  out << "\n[experiment]\n";
  out << "runs = " << cfg.n_runs << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  out << "histogram_bins = " << cfg.histogram_bins << "\n";
  if (cfg.has_draw_range) {
    out << "draw_min = " << format_number(cfg.draw_min) << "\n";
    out << "draw_max = " << format_number(cfg.draw_max) << "\n";
  }
  out << "aggregate_stride = " << cfg.aggregate_stride << "\n";
  out << "save_series = " << cfg.save_series << "\n";
  return out.str();
}

}  // namespace qfuse
