#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "latline/distinguish.hpp"
#include "latline/position_eval.hpp"
#include "latline_cli/config.hpp"

namespace latline::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitAlgorithm = 3, kExitIo = 4 };

/// Writes <out>/positions.txt and <out>/graph.txt.
void cmd_generate(const RunConfig& cfg);

/// Reads cfg.graph, writes <out>/order.txt and <out>/recovered_positions.txt,
/// plus <out>/report.csv when cfg.truth is set and <out>/scores.csv on request.
void cmd_recover(const RunConfig& cfg, std::ostream& log);

/// Writes <out>/distances.csv with every pair whose d̂ <= window U.
void cmd_estimate(const RunConfig& cfg);

inline const std::vector<std::size_t> kDefaultFigureGrid = {10000, 12500, 15000, 17500, 20000};

struct FigureRow {
  std::size_t m = 0;
  std::size_t graphs = 0;
  /// Graphs whose pipeline finished (differs from `graphs` only with keep-going).
  std::size_t completed = 0;
  Percentiles inversion;
  Percentiles position;
};

/// One generated graph through estimate, order, positions and evaluation.
EvalReport run_figure_pipeline(const RunConfig& cfg, std::size_t m, std::size_t graph_index);

/// Per-m averages over cfg.graphs graphs; also writes <out>/figure.csv.
std::vector<FigureRow> cmd_reproduce_figure(const RunConfig& cfg, std::ostream& log);

inline const std::vector<std::size_t> kDefaultDistinguishGrid = {100, 200, 400, 800, 1600, 3200};

/// Writes <out>/summary.csv and <out>/trials_m<m>.csv per grid point.
std::vector<DistinguishSummary> cmd_distinguish(const RunConfig& cfg, std::ostream& log);

/// Quick built-in property checks; prints one line per check. Returns the
/// number of failures.
int cmd_selftest(const RunConfig& cfg, std::ostream& out);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latline::cli
