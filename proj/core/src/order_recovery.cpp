#include "latline/order_recovery.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "latline/errors.hpp"
#include "latline/parallel.hpp"

namespace latline {

bool TripleSet::contains(Vertex i, Vertex j, Vertex k) const {
  const auto& list = by_middle_.at(j);
  return std::binary_search(list.begin(), list.end(), std::pair{i, k});
}

std::size_t TripleSet::size() const noexcept {
  std::size_t total = 0;
  for (const auto& list : by_middle_) total += list.size();
  return total;
}

namespace {

// Flank band C_j = {i : d̂(i, j) in [L + δ, 2L + 7δ]} for every j, as CSR rows
// sorted by vertex id.
class Flanks {
public:
  Flanks(const NearTable& near, const DistanceWindow& w) {
    const std::size_t m = near.vertex_count();
    offsets_.assign(m + 1, 0);
    for (std::size_t v = 0; v < m; ++v) {
      const auto ids = near.ids(static_cast<Vertex>(v));
      const auto ds = near.dists(static_cast<Vertex>(v));
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ds[k] >= w.flank_lo() && ds[k] <= w.flank_hi()) {
          ids_.push_back(ids[k]);
          dists_.push_back(ds[k]);
        }
      }
      offsets_[v + 1] = ids_.size();
    }
  }

  std::size_t total() const noexcept { return ids_.size(); }
  std::size_t offset(Vertex v) const noexcept { return offsets_[v]; }
  std::span<const Vertex> ids(Vertex v) const noexcept {
    return {ids_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> dists(Vertex v) const noexcept {
    return {dists_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::ptrdiff_t slot(Vertex v, Vertex u) const noexcept {
    const auto row = ids(v);
    auto it = std::lower_bound(row.begin(), row.end(), u);
    if (it == row.end() || *it != u) return -1;
    return it - row.begin();
  }

private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> ids_;
  std::vector<double> dists_;
};

// Calls f(k_slot) for every k in C_j (k != i) with
// d̂(i, k) > |d̂(i, j) − d̂(j, k)| + 3δ, in increasing k, until f returns false.
// Pairs missing from the near table have d̂ > bound >= the right-hand side.
template <class F>
void scan_admitted(const NearTable& near, const Flanks& flanks, Vertex j, std::size_t i_slot,
                   double margin, F&& f) {
  const auto cj = flanks.ids(j);
  const auto dj = flanks.dists(j);
  const Vertex i = cj[i_slot];
  const double d_ij = dj[i_slot];
  const auto ni = near.ids(i);
  const auto nd = near.dists(i);
  std::size_t p = 0;
  for (std::size_t s = 0; s < cj.size(); ++s) {
    const Vertex k = cj[s];
    if (k == i) continue;
    while (p < ni.size() && ni[p] < k) ++p;
    const double d_ik =
        (p < ni.size() && ni[p] == k) ? nd[p] : std::numeric_limits<double>::infinity();
    if (d_ik > std::abs(d_ij - dj[s]) + margin) {
      if (!f(s)) return;
    }
  }
}

struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::span<const std::uint32_t> out(std::size_t v) const {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// Iterative Tarjan. Components are numbered in reverse topological order
// (sinks receive the lowest ids).
std::vector<std::uint32_t> strong_components(const Csr& g, std::size_t n, std::size_t& count) {
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<std::uint32_t> stack;
  std::vector<bool> on_stack(n, false);
  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  count = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& fr = call.back();
      const auto edges = g.out(fr.v);
      if (fr.next < edges.size()) {
        const std::uint32_t w = edges[fr.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const std::uint32_t v = fr.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<std::uint32_t>(count);
        } while (w != v);
        ++count;
      }
    }
  }
  return comp;
}

// Weighted ancestor/descendant counts on the condensation via bit-parallel
// reachability sets. Parallel over 64-bit word blocks; each block is owned by
// one worker, so the result is independent of the thread count.
void reachability_counts(const Csr& dag, const std::vector<std::uint32_t>& sizes,
                         std::vector<std::uint64_t>& ancestors,
                         std::vector<std::uint64_t>& descendants, unsigned threads) {
  const std::size_t n = sizes.size();
  const std::size_t words = (n + 63) / 64;
  const bool unit = std::all_of(sizes.begin(), sizes.end(), [](std::uint32_t s) { return s == 1; });
  std::vector<std::uint64_t> desc(n * words, 0), anc(n * words, 0);

  // Reverse adjacency for the ancestor pass.
  Csr rev;
  rev.offsets.assign(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (auto d : dag.out(c)) ++rev.offsets[d + 1];
  std::partial_sum(rev.offsets.begin(), rev.offsets.end(), rev.offsets.begin());
  rev.targets.resize(dag.targets.size());
  {
    std::vector<std::size_t> fill(rev.offsets.begin(), rev.offsets.end() - 1);
    for (std::size_t c = 0; c < n; ++c)
      for (auto d : dag.out(c)) rev.targets[fill[d]++] = static_cast<std::uint32_t>(c);
  }

  constexpr std::size_t kBlock = 8;
  const std::size_t blocks = (words + kBlock - 1) / kBlock;
  std::vector<std::vector<std::uint64_t>> part_desc(blocks), part_anc(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t w0 = b * kBlock;
    const std::size_t w1 = std::min(words, w0 + kBlock);
    // Successors of c have lower ids, predecessors higher ids.
    for (std::size_t c = 0; c < n; ++c) {
      std::uint64_t* row = desc.data() + c * words;
      for (auto d : dag.out(c)) {
        const std::uint64_t* src = desc.data() + static_cast<std::size_t>(d) * words;
        for (std::size_t w = w0; w < w1; ++w) row[w] |= src[w];
        if (d / 64 >= w0 && d / 64 < w1) row[d / 64] |= std::uint64_t{1} << (d % 64);
      }
    }
    for (std::size_t c = n; c-- > 0;) {
      std::uint64_t* row = anc.data() + c * words;
      for (auto p : rev.out(c)) {
        const std::uint64_t* src = anc.data() + static_cast<std::size_t>(p) * words;
        for (std::size_t w = w0; w < w1; ++w) row[w] |= src[w];
        if (p / 64 >= w0 && p / 64 < w1) row[p / 64] |= std::uint64_t{1} << (p % 64);
      }
    }
    auto tally = [&](const std::vector<std::uint64_t>& bits, std::vector<std::uint64_t>& out) {
      out.assign(n, 0);
      for (std::size_t c = 0; c < n; ++c) {
        const std::uint64_t* row = bits.data() + c * words;
        std::uint64_t total = 0;
        for (std::size_t w = w0; w < w1; ++w) {
          std::uint64_t x = row[w];
          if (unit) {
            total += static_cast<std::uint64_t>(std::popcount(x));
          } else {
            while (x) {
              total += sizes[w * 64 + static_cast<std::size_t>(std::countr_zero(x))];
              x &= x - 1;
            }
          }
        }
        out[c] = total;
      }
    };
    tally(desc, part_desc[b]);
    tally(anc, part_anc[b]);
  });
  descendants.assign(n, 0);
  ancestors.assign(n, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      descendants[c] += part_desc[b][c];
      ancestors[c] += part_anc[b][c];
    }
  }
}

}  // namespace

TripleSet collect_triples(const DistanceEstimate& est, std::size_t m, unsigned threads) {
  if (est.vertex_count() != m) throw ConfigError("collect_triples: m does not match the estimate");
  const DistanceWindow& w = est.window();
  const NearTable near = est.near_table(w.flank_hi(), threads);
  const Flanks flanks(near, w);
  TripleSet triples(m);
  parallel_for(m, threads, [&](std::size_t jj) {
    const auto j = static_cast<Vertex>(jj);
    const auto cj = flanks.ids(j);
    auto& out = triples.mutable_around(j);
    for (std::size_t is = 0; is < cj.size(); ++is) {
      scan_admitted(near, flanks, j, is, 3.0 * w.delta, [&](std::size_t ks) {
        out.emplace_back(cj[is], cj[ks]);
        return true;
      });
    }
  });
  return triples;
}

OrderResult recover_order(const DistanceEstimate& est, std::size_t m, const OrderOptions& options) {
  if (m == 0) throw ConfigError("recover_order: requires m >= 1");
  if (est.vertex_count() != m) throw ConfigError("recover_order: m does not match the estimate");
  const DistanceWindow& w = est.window();
  const double margin = 3.0 * w.delta;

  OrderResult result;
  if (m == 1) {
    result.order = {0};
    result.scores = {0};
    result.component_count = 1;
    return result;
  }

  const NearTable near = est.near_table(w.flank_hi(), options.threads);
  const Flanks flanks(near, w);

  // 1. V' = vertices that are never the middle of an admitted triple.
  std::vector<std::uint8_t> is_middle(m, 0);
  parallel_for(m, options.threads, [&](std::size_t jj) {
    const auto j = static_cast<Vertex>(jj);
    const std::size_t width = flanks.ids(j).size();
    for (std::size_t is = 0; is < width && !is_middle[jj]; ++is) {
      scan_admitted(near, flanks, j, is, margin, [&](std::size_t) {
        is_middle[jj] = 1;
        return false;
      });
    }
  });
  std::vector<Vertex> endpoint_set;
  for (std::size_t v = 0; v < m; ++v)
    if (!is_middle[v]) endpoint_set.push_back(static_cast<Vertex>(v));
  if (endpoint_set.empty()) {
    throw EmptyAnchorSetError(
        "every vertex is the middle of some admitted triple; no endpoint anchor (check delta and "
        "the sample size)");
  }

  // 2-3. Anchor and its far partners V0.
  const Vertex anchor = endpoint_set.front();
  result.anchor = anchor;
  std::vector<Vertex> far_set;
  for (Vertex v : endpoint_set) {
    if (est.query(anchor, v) > w.U - w.delta) far_set.push_back(v);
  }
  if (far_set.empty()) {
    throw EmptyAnchorSetError("no endpoint vertex lies beyond U - delta from the anchor");
  }

  // 4-5. Seed E' from V0, then saturate. Edge a -> b is identified by the slot
  // of b in C_a. Triple (i, j, k) is still alive when (i, j) is processed iff
  // (k, j) has not been processed earlier, so deletions need no storage.
  constexpr std::uint8_t kInE = 1, kProcessed = 2;
  std::vector<std::uint8_t> state(flanks.total(), 0);
  std::vector<std::pair<Vertex, std::uint32_t>> queue;
  for (Vertex a : far_set) {
    const std::size_t width = flanks.ids(a).size();
    for (std::size_t s = 0; s < width; ++s) {
      state[flanks.offset(a) + s] |= kInE;
      queue.emplace_back(a, static_cast<std::uint32_t>(s));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [i, s_ij] = queue[head];
    state[flanks.offset(i) + s_ij] |= kProcessed;
    const Vertex j = flanks.ids(i)[s_ij];
    const std::ptrdiff_t i_slot = flanks.slot(j, i);
    if (i_slot < 0) continue;  // d̂ is symmetric, so this does not happen
    const auto cj = flanks.ids(j);
    scan_admitted(near, flanks, j, static_cast<std::size_t>(i_slot), margin, [&](std::size_t s_jk) {
      const Vertex k = cj[s_jk];
      const std::ptrdiff_t j_slot_in_k = flanks.slot(k, j);
      if (j_slot_in_k >= 0 && (state[flanks.offset(k) + j_slot_in_k] & kProcessed)) {
        return true;  // (k, j, i) fired first and removed this triple
      }
      std::uint8_t& st = state[flanks.offset(j) + s_jk];
      if (!(st & kInE)) {
        st |= kInE;
        queue.emplace_back(j, static_cast<std::uint32_t>(s_jk));
      }
      return true;
    });
  }
  std::vector<std::pair<Vertex, std::uint32_t>>().swap(queue);

  // 6. Directed graph G' and reachability scores.
  Csr oriented;
  oriented.offsets.assign(m + 1, 0);
  for (std::size_t a = 0; a < m; ++a) {
    const auto ids = flanks.ids(static_cast<Vertex>(a));
    for (std::size_t s = 0; s < ids.size(); ++s) {
      if (state[flanks.offset(static_cast<Vertex>(a)) + s] & kInE) oriented.targets.push_back(ids[s]);
    }
    oriented.offsets[a + 1] = oriented.targets.size();
  }
  result.oriented_graph_size = oriented.targets.size();
  if (options.keep_oriented_edges) {
    for (std::size_t a = 0; a < m; ++a)
      for (auto b : oriented.out(a)) result.oriented_edges.emplace_back(static_cast<Vertex>(a), b);
  }

  std::size_t comp_count = 0;
  const auto comp = strong_components(oriented, m, comp_count);
  result.component_count = comp_count;
  std::vector<std::uint32_t> sizes(comp_count, 0);
  for (auto c : comp) ++sizes[c];
  Csr dag;
  {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cedges;
    cedges.reserve(oriented.targets.size());
    for (std::size_t a = 0; a < m; ++a)
      for (auto b : oriented.out(a))
        if (comp[a] != comp[b]) cedges.emplace_back(comp[a], comp[b]);
    std::sort(cedges.begin(), cedges.end());
    cedges.erase(std::unique(cedges.begin(), cedges.end()), cedges.end());
    dag.offsets.assign(comp_count + 1, 0);
    for (auto [a, b] : cedges) ++dag.offsets[a + 1];
    std::partial_sum(dag.offsets.begin(), dag.offsets.end(), dag.offsets.begin());
    dag.targets.reserve(cedges.size());
    for (auto [a, b] : cedges) dag.targets.push_back(b);
  }
  std::vector<std::uint64_t> anc, desc;
  reachability_counts(dag, sizes, anc, desc, options.threads);

  result.scores.resize(m);
  for (std::size_t v = 0; v < m; ++v) {
    result.scores[v] = static_cast<std::int64_t>(anc[comp[v]]) - static_cast<std::int64_t>(desc[comp[v]]);
  }
  // 7. Sort by score, ties by index.
  result.order.resize(m);
  std::iota(result.order.begin(), result.order.end(), Vertex{0});
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](Vertex a, Vertex b) { return result.scores[a] < result.scores[b]; });
  return result;
}

void write_order(std::ostream& out, const OrderResult& result) {
  out << "latent-line-order v1\n";
  for (Vertex v : result.order) out << v << '\n';
}

std::vector<Vertex> read_order(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "latent-line-order v1") throw FormatError("not an order file");
  std::vector<Vertex> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vertex v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) throw FormatError("bad order line '" + line + "'");
    order.push_back(v);
  }
  return order;
}

void write_scores_csv(std::ostream& out, const OrderResult& result) {
  out << "vertex,R\n";
  for (std::size_t v = 0; v < result.scores.size(); ++v) out << v << ',' << result.scores[v] << '\n';
}

}  // namespace latline
