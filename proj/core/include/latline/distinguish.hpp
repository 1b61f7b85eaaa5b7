#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latline/model.hpp"

namespace latline {

/// Two same-order position vectors on [0, n] for the exponential model with
/// c = 1, and the precision δ that makes them "far".
struct HypothesisPair {
  PositionVector X;
  PositionVector Y;
  double delta = 0.0;

  std::size_t size() const noexcept { return X.size(); }
  /// max_i |x_i − y_i| > δ.
  bool is_delta_far() const;
  /// ||x_i − x_j| − |y_i − y_j||.
  double dprime(std::size_t i, std::size_t j) const;
};

/// y_i = (1 − 2δ/n) x_i. Requires X sorted ascending and 0 <= δ < n/2.
HypothesisPair construct_scaled(const PositionVector& X, double delta);

/// Y drawn as a fresh sorted uniform sample matched to X's order: a random
/// order-preserving alternative. Requires X sorted ascending.
HypothesisPair random_order_preserving(const PositionVector& X, double delta, std::uint64_t seed);

/// Per-pair log-likelihood ratio log P_X − log P_Y for one pair's outcome.
double pair_l_term(double d_x, double d_y, bool edge_present);

/// E_{edge ~ X}[pair_l_term] in closed form.
double pair_expected_l(double d_x, double d_y);

/// L = log P_X(G) − log P_Y(G), summed over all pairs.
double l_statistic(const HypothesisPair& pair, const RandomGraph& g);

/// KL(P_X ‖ P_Y) = Σ_{i<j} E[L_ij].
double expected_l(const HypothesisPair& pair);

enum class Hypothesis { FromX, FromY };
std::string_view to_string(Hypothesis h) noexcept;

struct TrialOutcome {
  Hypothesis truth = Hypothesis::FromX;
  double L = 0.0;
  double expected_L = 0.0;
  Hypothesis choice = Hypothesis::FromX;
  bool correct = false;
};

/// Likelihood-ratio tester: FromX iff L >= 0.
inline Hypothesis lr_choice(double L) noexcept { return L >= 0.0 ? Hypothesis::FromX : Hypothesis::FromY; }

struct DistinguishOptions {
  unsigned threads = 0;
  /// Reuse trial 0's X for every trial.
  bool fixed_x = false;
  /// Skip the coin and always sample from this hypothesis.
  std::optional<Hypothesis> forced_truth;
};

struct DistinguishSummary {
  double n = 0.0;
  std::size_t m = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  double error_rate = 0.0;
  double mean_expected_l = 0.0;
  std::string regime;
  std::vector<TrialOutcome> outcomes;
};

/// "below-lower" when m < 0.05 n^{1.5}/δ, "above-upper" when
/// m > n^{1.5} log n / δ, "between" otherwise.
std::string regime_label(double n, std::size_t m, double delta);

/// Sorted uniform X on [0, n] with no coincident points (resampled).
PositionVector sample_sorted_positions(std::size_t m, double n, std::uint64_t seed);

/// Monte Carlo distinguishing experiment with the LR tester. Trials are
/// independent and keyed by (seed, trial index).
DistinguishSummary run_distinguish_trials(double n, std::size_t m, double delta, std::size_t trials,
                                          std::uint64_t seed, const DistinguishOptions& options = {});

/// d′ triangle inequality over all triples (m <= exhaustive_limit) or
/// `samples` random triples.
bool check_dprime_triangle(const HypothesisPair& pair, std::uint64_t seed = 0,
                           std::size_t exhaustive_limit = 100, std::size_t samples = 100'000);

/// `trial,truth,L,expected_L,choice,correct`.
void write_trials_csv(std::ostream& out, const DistinguishSummary& summary);
/// `n,m,delta,trials,error_rate,mean_expected_L,regime`.
void write_summary_csv_header(std::ostream& out);
void write_summary_csv_row(std::ostream& out, const DistinguishSummary& summary);

}  // namespace latline
