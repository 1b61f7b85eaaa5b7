#include "latline/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "latline/errors.hpp"
#include "latline/math_kernels.hpp"
#include "latline/parallel.hpp"
#include "latline/rng.hpp"

namespace latline {

std::string_view to_string(Decay decay) noexcept {
  return decay == Decay::Exponential ? "exp" : "lin";
}

Decay parse_decay(std::string_view text) {
  if (text == "exp" || text == "exponential") return Decay::Exponential;
  if (text == "lin" || text == "linear") return Decay::Linear;
  throw ConfigError("model must be 'exp' or 'lin', got '" + std::string(text) + "'");
}

void ModelParams::validate_model() const {
  if (!std::isfinite(n) || !(n > 0.0)) throw ConfigError("n must be finite and > 0");
  if (!std::isfinite(c) || !(c > 0.0) || c > 1.0) throw ConfigError("c must satisfy 0 < c <= 1");
}

void ModelParams::validate() const {
  validate_model();
  if (!std::isfinite(delta) || !(delta > 0.0) || !(delta < 0.1)) {
    throw ConfigError("delta must satisfy 0 < delta < 0.1");
  }
}

PositionVector::PositionVector(double n, std::vector<double> positions)
    : n_(n), x_(std::move(positions)) {
  if (!std::isfinite(n_) || !(n_ > 0.0)) throw DomainError("PositionVector: n must be > 0");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] >= 0.0 && x_[i] <= n_)) {
      std::ostringstream os;
      os << "PositionVector: position " << i << " = " << x_[i] << " outside [0, " << n_ << "]";
      throw DomainError(os.str());
    }
  }
}

RandomGraph build_from_upper_lists(std::size_t m, std::vector<std::vector<Vertex>>&& upper) {
  if (upper.size() != m) throw IndexError("build_from_upper_lists: list count != m");
  std::vector<std::size_t> degree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    degree[i] += upper[i].size();
    for (Vertex j : upper[i]) ++degree[j];
  }
  RandomGraph g;
  g.offsets_.assign(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.adjacency_.resize(g.offsets_[m]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lower neighbours first, in increasing i, then the (sorted) upper list.
  for (std::size_t i = 0; i < m; ++i) {
    for (Vertex j : upper[i]) g.adjacency_[fill[j]++] = static_cast<Vertex>(i);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(upper[i].begin(), upper[i].end(), g.adjacency_.begin() + fill[i]);
    fill[i] += upper[i].size();
    std::vector<Vertex>().swap(upper[i]);
  }
  return g;
}

RandomGraph::RandomGraph(std::size_t m, std::span<const std::pair<Vertex, Vertex>> edges) {
  std::vector<std::vector<Vertex>> upper(m);
  for (auto [a, b] : edges) {
    if (a >= m || b >= m) throw IndexError("RandomGraph: edge endpoint out of range");
    if (a == b) throw DomainError("RandomGraph: self-loop");
    upper[std::min(a, b)].push_back(std::max(a, b));
  }
  for (auto& list : upper) {
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw DomainError("RandomGraph: duplicate edge");
    }
  }
  *this = build_from_upper_lists(m, std::move(upper));
}

std::span<const Vertex> RandomGraph::neighbors(Vertex v) const {
  if (v >= vertex_count()) throw IndexError("RandomGraph: vertex index out of range");
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool RandomGraph::has_edge(Vertex a, Vertex b) const {
  const auto list = neighbors(a);
  if (b >= vertex_count()) throw IndexError("RandomGraph: vertex index out of range");
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<std::pair<Vertex, Vertex>> RandomGraph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count());
  const std::size_t m = vertex_count();
  for (std::size_t i = 0; i < m; ++i) {
    const auto list = neighbors(static_cast<Vertex>(i));
    auto it = std::upper_bound(list.begin(), list.end(), static_cast<Vertex>(i));
    for (; it != list.end(); ++it) out.emplace_back(static_cast<Vertex>(i), *it);
  }
  return out;
}

PositionVector sample_positions(std::size_t m, const ModelParams& params, std::uint64_t seed) {
  params.validate_model();
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = params.n * uniform_at(seed, Stream::Positions, i);
  }
  return PositionVector(params.n, std::move(x));
}

namespace {

inline double edge_probability_unchecked(const ModelParams& params, double d) noexcept {
  return params.decay == Decay::Exponential ? params.c * std::exp(-d) : params.c / (d + 1.0);
}

}  // namespace

double edge_probability(const ModelParams& params, double d) {
  if (!std::isfinite(d)) throw DomainError("edge_probability: non-finite distance");
  if (d < 0.0) throw DomainError("edge_probability: negative distance");
  return edge_probability_unchecked(params, d);
}

RandomGraph sample_graph(const PositionVector& x, const ModelParams& params, std::uint64_t seed,
                         const GraphSampling& options) {
  params.validate_model();
  if (x.n() != params.n) throw ConfigError("sample_graph: positions and params disagree on n");
  const std::size_t m = x.size();
  std::vector<std::vector<Vertex>> upper(m);

  const bool cutoff = options.cutoff && params.decay == Decay::Exponential;
  // Sorted view used only to bound the scan when the cutoff is on.
  std::vector<Vertex> by_pos;
  std::vector<double> sorted_pos;
  double max_dist = std::numeric_limits<double>::infinity();
  if (cutoff) {
    by_pos.resize(m);
    std::iota(by_pos.begin(), by_pos.end(), Vertex{0});
    std::stable_sort(by_pos.begin(), by_pos.end(),
                     [&](Vertex a, Vertex b) { return x[a] < x[b]; });
    sorted_pos.resize(m);
    for (std::size_t r = 0; r < m; ++r) sorted_pos[r] = x[by_pos[r]];
    max_dist = std::log(params.c / kEdgeCutoffProbability);
  }

  parallel_for_chunks(m, options.threads, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& out = upper[i];
      const double xi = x[i];
      auto consider = [&](std::size_t j) {
        const double d = std::abs(xi - x[j]);
        const double p = edge_probability_unchecked(params, d);
        if (uniform_at(seed, Stream::Edges, i, j) < p) out.push_back(static_cast<Vertex>(j));
      };
      if (!cutoff) {
        for (std::size_t j = i + 1; j < m; ++j) consider(j);
      } else {
        auto lo = std::lower_bound(sorted_pos.begin(), sorted_pos.end(), xi - max_dist);
        auto hi = std::upper_bound(sorted_pos.begin(), sorted_pos.end(), xi + max_dist);
        std::vector<Vertex> cand;
        for (auto it = lo; it != hi; ++it) {
          const Vertex j = by_pos[static_cast<std::size_t>(it - sorted_pos.begin())];
          if (j > i) cand.push_back(j);
        }
        std::sort(cand.begin(), cand.end());
        for (Vertex j : cand) {
          if (std::abs(xi - x[j]) <= max_dist) consider(j);
        }
      }
    }
  });
  return build_from_upper_lists(m, std::move(upper));
}

double log_likelihood(const PositionVector& x, const RandomGraph& g, const ModelParams& params) {
  params.validate_model();
  const std::size_t m = x.size();
  if (g.vertex_count() != m) throw IndexError("log_likelihood: graph and positions differ in m");
  const bool exp_unit = params.decay == Decay::Exponential && params.c == 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto nb = g.neighbors(static_cast<Vertex>(i));
    auto it = std::upper_bound(nb.begin(), nb.end(), static_cast<Vertex>(i));
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = std::abs(x[i] - x[j]);
      const bool edge = it != nb.end() && *it == j;
      if (edge) ++it;
      if (edge) {
        total += params.decay == Decay::Exponential ? std::log(params.c) - d
                                                    : std::log(params.c) - std::log1p(d);
      } else if (exp_unit) {
        if (d == 0.0) return -std::numeric_limits<double>::infinity();
        total += log1m_exp_neg(d);
      } else {
        const double p = edge_probability_unchecked(params, d);
        if (p >= 1.0) return -std::numeric_limits<double>::infinity();
        total += std::log1p(-p);
      }
    }
  }
  return total;
}

double expected_degree_density(const ModelParams& params, double x) {
  params.validate_model();
  const double n = params.n;
  if (!(x >= 0.0 && x <= n)) throw DomainError("expected_degree_density: x outside [0, n]");
  if (params.decay == Decay::Exponential) {
    return params.c / n * (2.0 - std::exp(-x) - std::exp(x - n));
  }
  return params.c * (std::log1p(x) + std::log1p(n - x)) / n;
}

double expected_common_density(const ModelParams& params, double x_i, double x_j) {
  params.validate_model();
  const double n = params.n;
  if (!(x_i >= 0.0 && x_i <= n) || !(x_j >= 0.0 && x_j <= n)) {
    throw DomainError("expected_common_density: position outside [0, n]");
  }
  const double a = std::min(x_i, x_j);
  const double b = std::max(x_i, x_j);
  const double d = b - a;
  const double c2n = params.c * params.c / n;
  if (params.decay == Decay::Exponential) {
    return c2n * (g_exp(d) - 0.5 * (std::exp(-a - b) + std::exp(a + b - 2.0 * n)));
  }
  // h_lin and g_log both carry their d -> 0 limits.
  return c2n * (h_lin(d) - g_log(a + 1.0, b + 1.0) - g_log(n - b + 1.0, n - a + 1.0));
}

}  // namespace latline
