#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nli/kernel.hpp"
#include "nli/link.hpp"
#include "nli/mc_oracle.hpp"
#include "nli/spectra.hpp"

namespace nli {

/// Log-spaced |F| samples for the `kernel` subcommand.
struct KernelGridConfig {
  double f_min_hz2 = 1e16;
  double f_max_hz2 = 1e22;
  std::size_t points = 100;
  bool include_zero = true;
  bool include_negative = false;
};

/// Output grid and quadrature step for the `psd` subcommand.
struct PsdOutputConfig {
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;
  std::size_t points = 0;
  double inner_step_hz = 0.0;
  bool include_phase_term = true;
  char polarization = 'x';  // 'x' or 'y'
  bool quadrature_kernel = false;
};

struct MonteCarloConfig {
  PerturbationMode mode = PerturbationMode::Rp1;
  std::size_t lines = 64;
  double spacing_hz = 0.0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double edge_margin = 0.1;
  double z_max = 3.0;
  char polarization = 'x';
  /// Inner step of the analytic reference; 0 selects the line spacing.
  double inner_step_hz = 0.0;
};

struct MomentsConfig {
  int theorem = 2;
  std::size_t k = 3;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  std::size_t ensembles = 20;
  std::size_t grid_size = 32;
};

/// Everything a run needs, in SI units, validated on load.
struct RunConfig {
  std::string source;  // path of the configuration file
  LinkProfile link;
  QuadratureOptions quadrature;
  DualPolPsd psd;
  KernelGridConfig kernel;
  PsdOutputConfig psd_output;
  MonteCarloConfig montecarlo;
  MomentsConfig moments;
};

/// Parses a JSON configuration file; relative CSV paths resolve against the
/// file's directory. Throws ConfigError on any missing, unknown-unit or
/// out-of-range field.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

/// Flattened "key: value" pairs of the resolved configuration.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

}  // namespace nli
