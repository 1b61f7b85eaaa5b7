#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latline/distance.hpp"
#include "latline/model.hpp"

namespace latline::cli {

/// Every knob any subcommand reads. Each command uses the subset it needs.
struct RunConfig {
  double n = 25.0;
  std::size_t m = 1000;
  double c = 1.0;
  Decay model = Decay::Exponential;
  double delta = 0.05;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::size_t graphs = 30;
  unsigned threads = 0;
  /// Empty means the command's own default grid.
  std::vector<std::size_t> m_grid;
  std::optional<double> window_L;
  std::optional<double> window_U;
  std::optional<double> window_delta;
  bool cutoff = false;
  bool fixed_x = false;
  bool keep_going = false;
  bool scores = false;
  double tau_same = kDefaultSameEndpointThreshold;
  std::string graph;
  std::string truth;
  std::string out = ".";

  ModelParams params() const { return {n, c, model, delta}; }
  /// Default model window with any overrides applied.
  DistanceWindow window() const;
};

/// Sets one field from its `key=value` spelling (keys match the long flag
/// names). Throws ConfigError on unknown keys or malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Plain `key=value` lines; blank lines and `#` comments are ignored.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Effective configuration as sorted `key=value` lines. `threads` is left out
/// unless requested, since outputs must not depend on it.
std::vector<std::string> describe(const RunConfig& cfg, bool include_threads = false);

}  // namespace latline::cli
