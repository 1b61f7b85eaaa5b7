#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "latline/model.hpp"

namespace latline {

/// Common-neighbour count of an unordered pair, stored with i < j.
struct PairStats {
  Vertex i;
  Vertex j;
  std::uint32_t common_count;

  bool operator==(const PairStats&) const = default;
};

std::size_t degree(const RandomGraph& g, Vertex i);

/// |N(i) ∩ N(j)| by sorted-list intersection. i == j is an error.
std::size_t common_neighbors(const RandomGraph& g, Vertex i, Vertex j);

/// Counts common neighbours of one vertex against all others in
/// Σ_{w ∈ N(i)} deg(w) time. Holds an O(m) scratch buffer, so keep one per
/// thread.
class CommonNeighborCounter {
public:
  explicit CommonNeighborCounter(std::size_t m);

  /// (j, count) for every j > min_exclusive with count >= 1, sorted by j.
  /// Pass min_exclusive = -1 (default) to include all j != i.
  void row(const RandomGraph& g, Vertex i, std::vector<std::pair<Vertex, std::uint32_t>>& out,
           std::int64_t min_exclusive = -1);

private:
  std::vector<std::uint32_t> counts_;
  std::vector<Vertex> touched_;
};

/// Every pair with at least one common neighbour, keyed (min, max) and sorted.
/// Absent pairs have count 0.
class CooccurrenceTable {
public:
  CooccurrenceTable() = default;
  explicit CooccurrenceTable(std::vector<PairStats> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const PairStats> entries() const noexcept { return entries_; }

  /// Count for {a, b}; 0 when the pair is absent.
  std::uint32_t count(Vertex a, Vertex b) const;

private:
  std::vector<PairStats> entries_;
};

CooccurrenceTable cooccurrence_table(const RandomGraph& g, unsigned threads = 0);

}  // namespace latline
