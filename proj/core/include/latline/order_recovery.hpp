#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "latline/distance.hpp"
#include "latline/model.hpp"

namespace latline {

/// Admitted ordered triples (i, j, k) with j the middle vertex. Both
/// orientations (i, j, k) and (k, j, i) are stored.
class TripleSet {
public:
  explicit TripleSet(std::size_t m = 0) : by_middle_(m) {}

  std::size_t vertex_count() const noexcept { return by_middle_.size(); }
  /// Sorted (i, k) flank pairs admitted around middle j.
  const std::vector<std::pair<Vertex, Vertex>>& around(Vertex j) const { return by_middle_.at(j); }
  bool contains(Vertex i, Vertex j, Vertex k) const;
  std::size_t size() const noexcept;

  std::vector<std::pair<Vertex, Vertex>>& mutable_around(Vertex j) { return by_middle_.at(j); }

private:
  std::vector<std::vector<std::pair<Vertex, Vertex>>> by_middle_;
};

/// Materialises every admitted triple. Cubic in the flank-band size per
/// vertex; meant for small instances and cross-checks.
TripleSet collect_triples(const DistanceEstimate& est, std::size_t m, unsigned threads = 0);

struct OrderResult {
  /// Vertices sorted by score ascending, ties by index.
  std::vector<Vertex> order;
  /// R(v) = #(vertices reaching v) - #(vertices reachable from v).
  std::vector<std::int64_t> scores;
  Vertex anchor = 0;
  std::size_t oriented_graph_size = 0;
  /// Strongly connected components of the oriented graph (= m when acyclic).
  std::size_t component_count = 0;
  /// Filled only when OrderOptions::keep_oriented_edges is set.
  std::vector<std::pair<Vertex, Vertex>> oriented_edges;
};

struct OrderOptions {
  unsigned threads = 0;
  bool keep_oriented_edges = false;
};

/// Order recovery from an approximate distance function: endpoint anchor,
/// triple-driven edge orientation, then reachability scores. Throws
/// EmptyAnchorSetError when no endpoint vertex or no far partner exists.
OrderResult recover_order(const DistanceEstimate& est, std::size_t m, const OrderOptions& options = {});

/// `latent-line-order v1` then one vertex per line.
void write_order(std::ostream& out, const OrderResult& result);
std::vector<Vertex> read_order(std::istream& in);
/// CSV `vertex,R`.
void write_scores_csv(std::ostream& out, const OrderResult& result);

}  // namespace latline
