#include "latline/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "latline/errors.hpp"
#include "latline/io.hpp"
#include "latline/math_kernels.hpp"
#include "latline/parallel.hpp"
#include "latline/rng.hpp"

namespace latline {

namespace {

void require_sorted(const PositionVector& X) {
  const auto v = X.values();
  if (!std::is_sorted(v.begin(), v.end())) throw ConfigError("X must be sorted ascending");
}

ModelParams exp_unit(double n) {
  ModelParams p;
  p.n = n;
  p.c = 1.0;
  p.decay = Decay::Exponential;
  return p;
}

// Per-row partial sums keep the rounding pattern independent of m's parity.
template <class Row>
double sum_rows(std::size_t m, Row&& row) {
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += row(i);
  return total;
}

}  // namespace

bool HypothesisPair::is_delta_far() const {
  for (std::size_t i = 0; i < X.size(); ++i)
    if (std::abs(X[i] - Y[i]) > delta) return true;
  return false;
}

double HypothesisPair::dprime(std::size_t i, std::size_t j) const {
  return std::abs(std::abs(X[i] - X[j]) - std::abs(Y[i] - Y[j]));
}

HypothesisPair construct_scaled(const PositionVector& X, double delta) {
  require_sorted(X);
  if (!(delta >= 0.0) || !(delta < X.n() / 2.0)) throw ConfigError("construct_scaled: need 0 <= delta < n/2");
  const double s = 1.0 - 2.0 * delta / X.n();
  std::vector<double> y(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) y[i] = s * X[i];
  return {X, PositionVector(X.n(), std::move(y)), delta};
}

HypothesisPair random_order_preserving(const PositionVector& X, double delta, std::uint64_t seed) {
  require_sorted(X);
  return {X, sample_sorted_positions(X.size(), X.n(), seed), delta};
}

double pair_l_term(double d_x, double d_y, bool edge_present) {
  if (!(d_x > 0.0) || !(d_y > 0.0)) throw DomainError("pair_l_term: distances must be positive");
  if (edge_present) return d_y - d_x;
  return log1m_exp_neg(d_x) - log1m_exp_neg(d_y);
}

double pair_expected_l(double d_x, double d_y) {
  if (!(d_x > 0.0) || !(d_y > 0.0)) throw DomainError("pair_expected_l: distances must be positive");
  const double p = std::exp(-d_x);
  return p * (d_y - d_x) + (1.0 - p) * (log1m_exp_neg(d_x) - log1m_exp_neg(d_y));
}

double l_statistic(const HypothesisPair& pair, const RandomGraph& g) {
  const std::size_t m = pair.size();
  if (g.vertex_count() != m || pair.Y.size() != m) throw ConfigError("l_statistic: size mismatch");
  return sum_rows(m, [&](std::size_t i) {
    const auto nb = g.neighbors(static_cast<Vertex>(i));
    auto it = std::upper_bound(nb.begin(), nb.end(), static_cast<Vertex>(i));
    double s = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool edge = it != nb.end() && *it == j;
      if (edge) ++it;
      s += pair_l_term(std::abs(pair.X[i] - pair.X[j]), std::abs(pair.Y[i] - pair.Y[j]), edge);
    }
    return s;
  });
}

double expected_l(const HypothesisPair& pair) {
  const std::size_t m = pair.size();
  if (pair.Y.size() != m) throw ConfigError("expected_l: size mismatch");
  return sum_rows(m, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < m; ++j)
      s += pair_expected_l(std::abs(pair.X[i] - pair.X[j]), std::abs(pair.Y[i] - pair.Y[j]));
    return s;
  });
}

std::string_view to_string(Hypothesis h) noexcept { return h == Hypothesis::FromX ? "X" : "Y"; }

std::string regime_label(double n, std::size_t m, double delta) {
  if (delta <= 0.0) return "below-lower";
  const double lower = 0.05 * std::pow(n, 1.5) / delta;
  const double upper = std::pow(n, 1.5) * std::log(n) / delta;
  const auto mm = static_cast<double>(m);
  if (mm < lower) return "below-lower";
  if (mm > upper) return "above-upper";
  return "between";
}

PositionVector sample_sorted_positions(std::size_t m, double n, std::uint64_t seed) {
  const ModelParams params = exp_unit(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, Stream::Sampling, attempt);
    const PositionVector raw = sample_positions(m, params, s);
    std::vector<double> v(raw.values().begin(), raw.values().end());
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) == v.end()) return PositionVector(n, std::move(v));
  }
}

DistinguishSummary run_distinguish_trials(double n, std::size_t m, double delta, std::size_t trials,
                                          std::uint64_t seed, const DistinguishOptions& options) {
  if (trials == 0) throw ConfigError("run_distinguish_trials: trials must be >= 1");
  exp_unit(n).validate_model();
  DistinguishSummary summary;
  summary.n = n;
  summary.m = m;
  summary.delta = delta;
  summary.trials = trials;
  summary.regime = regime_label(n, m, delta);
  summary.outcomes.resize(trials);

  std::optional<HypothesisPair> shared;
  if (options.fixed_x) {
    shared = construct_scaled(sample_sorted_positions(m, n, derive_seed(seed, Stream::Trials, 0)), delta);
  }
  const ModelParams params = exp_unit(n);
  parallel_for_chunks(trials, options.threads, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      const std::uint64_t ts = derive_seed(seed, Stream::Trials, t);
      const HypothesisPair pair =
          shared ? *shared : construct_scaled(sample_sorted_positions(m, n, ts), delta);
      TrialOutcome& out = summary.outcomes[t];
      out.truth = options.forced_truth
                      ? *options.forced_truth
                      : (uniform_at(seed, Stream::Coin, t) < 0.5 ? Hypothesis::FromX : Hypothesis::FromY);
      const PositionVector& z = out.truth == Hypothesis::FromX ? pair.X : pair.Y;
      const RandomGraph g = sample_graph(z, params, derive_seed(ts, Stream::Edges, 0), {.threads = 1});
      out.L = l_statistic(pair, g);
      out.expected_L = expected_l(pair);
      out.choice = lr_choice(out.L);
      out.correct = out.choice == out.truth;
    }
  });
  std::size_t wrong = 0;
  double el = 0.0;
  for (const auto& o : summary.outcomes) {
    wrong += o.correct ? 0 : 1;
    el += o.expected_L;
  }
  summary.error_rate = static_cast<double>(wrong) / static_cast<double>(trials);
  summary.mean_expected_l = el / static_cast<double>(trials);
  return summary;
}

bool check_dprime_triangle(const HypothesisPair& pair, std::uint64_t seed,
                           std::size_t exhaustive_limit, std::size_t samples) {
  const std::size_t m = pair.size();
  // Relative slack for rounding in the three subtractions.
  auto holds = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double lhs = pair.dprime(i, j);
    const double rhs = pair.dprime(i, k) + pair.dprime(k, j);
    return lhs <= rhs + 1e-12 * std::max(1.0, pair.X.n());
  };
  if (m < 3) return true;
  if (m <= exhaustive_limit) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
          if (!holds(i, j, k)) return false;
    return true;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    auto pick = [&](std::uint64_t slot) {
      return std::min(m - 1, static_cast<std::size_t>(uniform_at(seed, Stream::Sampling, s, slot) *
                                                      static_cast<double>(m)));
    };
    if (!holds(pick(0), pick(1), pick(2))) return false;
  }
  return true;
}

void write_trials_csv(std::ostream& out, const DistinguishSummary& summary) {
  out << "trial,truth,L,expected_L,choice,correct\n";
  for (std::size_t t = 0; t < summary.outcomes.size(); ++t) {
    const auto& o = summary.outcomes[t];
    out << t << ',' << to_string(o.truth) << ',' << format_real(o.L) << ','
        << format_real(o.expected_L) << ',' << to_string(o.choice) << ',' << (o.correct ? 1 : 0)
        << '\n';
  }
}

void write_summary_csv_header(std::ostream& out) {
  out << "n,m,delta,trials,error_rate,mean_expected_L,regime\n";
}

void write_summary_csv_row(std::ostream& out, const DistinguishSummary& s) {
  out << format_real(s.n) << ',' << s.m << ',' << format_real(s.delta) << ',' << s.trials << ','
      << format_real(s.error_rate) << ',' << format_real(s.mean_expected_l) << ',' << s.regime
      << '\n';
}

}  // namespace latline
