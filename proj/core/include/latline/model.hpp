#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latline {

using Vertex = std::uint32_t;

enum class Decay { Exponential, Linear };

std::string_view to_string(Decay decay) noexcept;
/// Parses "exp" / "lin" (also "exponential" / "linear").
Decay parse_decay(std::string_view text);

/// Parameters of the latent line model: segment [0, n], edge probability
/// c * f(|x_i - x_j|) with f(d) = e^{-d} or 1/(d + 1), precision delta.
struct ModelParams {
  double n = 25.0;
  double c = 1.0;
  Decay decay = Decay::Exponential;
  double delta = 0.05;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
  /// Checks n and c only; for operations that never read delta.
  void validate_model() const;
};

/// Latent locations x_1..x_m on [0, n]; the index is the vertex identity.
class PositionVector {
public:
  PositionVector() = default;
  PositionVector(double n, std::vector<double> positions);

  double n() const noexcept { return n_; }
  std::size_t size() const noexcept { return x_.size(); }
  bool empty() const noexcept { return x_.empty(); }
  double operator[](std::size_t i) const noexcept { return x_[i]; }
  std::span<const double> values() const noexcept { return x_; }

  bool operator==(const PositionVector&) const = default;

private:
  double n_ = 0.0;
  std::vector<double> x_;
};

/// Simple undirected graph on vertices 0..m-1 with sorted adjacency lists.
class RandomGraph {
public:
  RandomGraph() = default;
  /// Builds from an edge list; rejects self-loops, duplicates and bad indices.
  RandomGraph(std::size_t m, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const;
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }
  bool has_edge(Vertex a, Vertex b) const;

  /// All edges as (i, j) with i < j in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  bool operator==(const RandomGraph&) const = default;

private:
  friend RandomGraph build_from_upper_lists(std::size_t m,
                                            std::vector<std::vector<Vertex>>&& upper);
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
};

/// Assembles a graph from per-vertex sorted lists of higher-indexed neighbours.
RandomGraph build_from_upper_lists(std::size_t m, std::vector<std::vector<Vertex>>&& upper);

/// m i.i.d. uniform positions on [0, n]; vertex i depends only on (seed, i).
PositionVector sample_positions(std::size_t m, const ModelParams& params, std::uint64_t seed);

/// c e^{-d} or c/(d + 1).
double edge_probability(const ModelParams& params, double d);

struct GraphSampling {
  unsigned threads = 0;
  /// Skip exponential-model pairs whose probability is below 1e-15.
  /// Approximate; off by default.
  bool cutoff = false;
};

inline constexpr double kEdgeCutoffProbability = 1e-15;

/// Each pair {i, j} is kept with its model probability; the Bernoulli draw is
/// keyed on (seed, i, j) so the result is independent of thread count.
RandomGraph sample_graph(const PositionVector& x, const ModelParams& params, std::uint64_t seed,
                         const GraphSampling& options = {});

/// log P_X(G). Returns -infinity when G has probability zero under X.
double log_likelihood(const PositionVector& x, const RandomGraph& g, const ModelParams& params);

/// P(edge to one uniformly placed vertex) for a vertex at x.
double expected_degree_density(const ModelParams& params, double x);

/// P(one uniformly placed vertex is adjacent to both x_i and x_j).
double expected_common_density(const ModelParams& params, double x_i, double x_j);

}  // namespace latline
