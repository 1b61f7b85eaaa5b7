#include "latline/graph_stats.hpp"

#include <algorithm>

#include "latline/errors.hpp"
#include "latline/parallel.hpp"

namespace latline {

std::size_t degree(const RandomGraph& g, Vertex i) { return g.degree(i); }

std::size_t common_neighbors(const RandomGraph& g, Vertex i, Vertex j) {
  if (i == j) throw IndexError("common_neighbors: i == j");
  const auto a = g.neighbors(i);
  const auto b = g.neighbors(j);
  std::size_t count = 0;
  auto p = a.begin();
  auto q = b.begin();
  while (p != a.end() && q != b.end()) {
    if (*p < *q) {
      ++p;
    } else if (*q < *p) {
      ++q;
    } else {
      ++count;
      ++p;
      ++q;
    }
  }
  return count;
}

CommonNeighborCounter::CommonNeighborCounter(std::size_t m) : counts_(m, 0) {}

void CommonNeighborCounter::row(const RandomGraph& g, Vertex i,
                                std::vector<std::pair<Vertex, std::uint32_t>>& out,
                                std::int64_t min_exclusive) {
  out.clear();
  if (counts_.size() != g.vertex_count()) counts_.assign(g.vertex_count(), 0);
  touched_.clear();
  for (Vertex w : g.neighbors(i)) {
    const auto nw = g.neighbors(w);
    auto it = nw.begin();
    if (min_exclusive >= 0) {
      it = std::upper_bound(nw.begin(), nw.end(), static_cast<Vertex>(min_exclusive));
    }
    for (; it != nw.end(); ++it) {
      const Vertex u = *it;
      if (counts_[u]++ == 0) touched_.push_back(u);
    }
  }
  std::sort(touched_.begin(), touched_.end());
  for (Vertex u : touched_) {
    if (u != i) out.emplace_back(u, counts_[u]);
    counts_[u] = 0;
  }
}

std::uint32_t CooccurrenceTable::count(Vertex a, Vertex b) const {
  if (a == b) throw IndexError("CooccurrenceTable::count: a == b");
  const PairStats key{std::min(a, b), std::max(a, b), 0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const PairStats& x, const PairStats& y) {
                               return std::pair{x.i, x.j} < std::pair{y.i, y.j};
                             });
  if (it == entries_.end() || it->i != key.i || it->j != key.j) return 0;
  return it->common_count;
}

CooccurrenceTable cooccurrence_table(const RandomGraph& g, unsigned threads) {
  const std::size_t m = g.vertex_count();
  // Rows are owned by index; concatenating them in order gives a
  // deterministic table regardless of the partitioning.
  std::vector<std::vector<PairStats>> rows(m);
  parallel_for_chunks(m, threads, 32, [&](std::size_t begin, std::size_t end) {
    CommonNeighborCounter counter(m);
    std::vector<std::pair<Vertex, std::uint32_t>> row;
    for (std::size_t i = begin; i < end; ++i) {
      const auto v = static_cast<Vertex>(i);
      counter.row(g, v, row, static_cast<std::int64_t>(i));
      rows[i].reserve(row.size());
      for (auto [j, cnt] : row) rows[i].push_back({v, j, cnt});
    }
  });
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<PairStats> entries;
  entries.reserve(total);
  for (auto& r : rows) {
    entries.insert(entries.end(), r.begin(), r.end());
    std::vector<PairStats>().swap(r);
  }
  return CooccurrenceTable(std::move(entries));
}

}  // namespace latline
