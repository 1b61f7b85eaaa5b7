#include "latline/position_eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <vector>

#include "latline/errors.hpp"
#include "latline/io.hpp"
#include "latline/rng.hpp"

namespace latline {

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::AsIs ? "as-is" : "reflected";
}

Percentiles nearest_rank_percentiles(std::span<const double> sample) {
  Percentiles p;
  if (sample.empty()) return p;
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto at = [&](std::size_t pct) {
    const std::size_t rank = (pct * n + 99) / 100;  // ceil(pct * n / 100)
    return v[std::max<std::size_t>(rank, 1) - 1];
  };
  p.p90 = at(90);
  p.p95 = at(95);
  p.p99 = at(99);
  p.max = v.back();
  return p;
}

PositionVector recover_positions(std::span<const Vertex> order, double n, std::size_t m) {
  if (order.size() != m) throw ConfigError("recover_positions: order does not cover m vertices");
  std::vector<double> x(m, -1.0);
  for (std::size_t r = 0; r < m; ++r) {
    const Vertex v = order[r];
    if (v >= m || x[v] >= 0.0) throw ConfigError("recover_positions: order is not a permutation");
    // Exact at r + 1 = m so the last vertex sits at n.
    x[v] = (r + 1 == m) ? n : static_cast<double>(r + 1) * n / static_cast<double>(m);
  }
  return PositionVector(n, std::move(x));
}

PositionVector recover_positions(const OrderResult& order, double n, std::size_t m) {
  return recover_positions(order.order, n, m);
}

namespace {

void check_permutation(const PositionVector& truth, std::span<const Vertex> order) {
  if (order.size() != truth.size()) throw ConfigError("order and truth differ in size");
  std::vector<bool> seen(order.size(), false);
  for (Vertex v : order) {
    if (v >= order.size() || seen[v]) throw ConfigError("order is not a permutation");
    seen[v] = true;
  }
}

// Dense ranks of the true positions (equal positions share a rank).
std::vector<std::size_t> dense_ranks(const PositionVector& truth, std::size_t& distinct) {
  std::vector<double> values(truth.values().begin(), truth.values().end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  distinct = values.size();
  std::vector<std::size_t> r(truth.size());
  for (std::size_t v = 0; v < truth.size(); ++v) {
    r[v] = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), truth[v]) -
                                    values.begin());
  }
  return r;
}

class Fenwick {
public:
  explicit Fenwick(std::size_t n) : t_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < t_.size(); i += i & (~i + 1)) ++t_[i];
  }
  // Number of inserted values with rank < i.
  std::uint64_t prefix(std::size_t i) const {
    std::uint64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += t_[i];
    return s;
  }

private:
  std::vector<std::uint64_t> t_;
};

// Oriented sequence of true positions.
std::vector<double> oriented_values(const PositionVector& truth, std::span<const Vertex> order,
                                    Orientation o) {
  std::vector<double> seq(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) seq[r] = truth[order[r]];
  if (o == Orientation::Reflected) std::reverse(seq.begin(), seq.end());
  return seq;
}

// Calls f(distance, ordinal) for every inverted pair, where ordinal counts
// pairs in scan order. `wanted` (sorted ordinals) restricts the calls when set.
template <class F>
void scan_inverted(const std::vector<double>& seq, const std::vector<std::uint64_t>* wanted, F&& f) {
  std::multiset<double> seen;
  std::uint64_t ordinal = 0;
  std::size_t next = 0;
  for (double v : seq) {
    auto first = seen.upper_bound(v);
    if (wanted == nullptr) {
      for (auto it = first; it != seen.end(); ++it) f(*it - v, ordinal++);
    } else {
      const auto greater = static_cast<std::uint64_t>(std::distance(first, seen.end()));
      auto it = first;
      std::uint64_t at = ordinal;
      while (next < wanted->size() && (*wanted)[next] < ordinal + greater) {
        std::advance(it, static_cast<std::ptrdiff_t>((*wanted)[next] - at));
        at = (*wanted)[next];
        f(*it - v, at);
        ++next;
      }
      ordinal += greater;
    }
    seen.insert(v);
  }
}

}  // namespace

InversionCounts count_inversions(const PositionVector& truth, std::span<const Vertex> order) {
  check_permutation(truth, order);
  std::size_t distinct = 0;
  const auto rank = dense_ranks(truth, distinct);
  Fenwick tree(distinct);
  InversionCounts counts;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t k = rank[order[r]];
    const std::uint64_t below = tree.prefix(k);
    const std::uint64_t at_or_below = tree.prefix(k + 1);
    counts.as_is += r - at_or_below;  // earlier and strictly greater
    counts.reflected += below;        // earlier and strictly smaller
    tree.add(k);
  }
  return counts;
}

InversionReport inversion_report(const PositionVector& truth, std::span<const Vertex> order,
                                 const InversionOptions& options) {
  const InversionCounts counts = count_inversions(truth, order);
  InversionReport report;
  report.orientation =
      counts.reflected < counts.as_is ? Orientation::Reflected : Orientation::AsIs;
  report.inversion_count =
      report.orientation == Orientation::AsIs ? counts.as_is : counts.reflected;
  if (report.inversion_count == 0) return report;

  const auto seq = oriented_values(truth, order, report.orientation);
  std::vector<double> distances;
  if (report.inversion_count <= options.pair_cap) {
    distances.reserve(report.inversion_count);
    scan_inverted(seq, nullptr, [&](double d, std::uint64_t) { distances.push_back(d); });
  } else {
    // Uniform sample (with replacement) of pair ordinals, one pass.
    report.sampled = true;
    const std::uint64_t k = std::max<std::uint64_t>(options.sample_size, 1);
    std::vector<std::uint64_t> wanted(k);
    for (std::uint64_t s = 0; s < k; ++s) {
      wanted[s] = std::min(report.inversion_count - 1,
                           static_cast<std::uint64_t>(uniform_at(options.seed, Stream::Sampling, s) *
                                                      static_cast<double>(report.inversion_count)));
    }
    std::sort(wanted.begin(), wanted.end());
    distances.reserve(k);
    // Duplicated ordinals each contribute one draw.
    std::vector<std::uint64_t> unique_wanted = wanted;
    unique_wanted.erase(std::unique(unique_wanted.begin(), unique_wanted.end()), unique_wanted.end());
    std::size_t w = 0;
    scan_inverted(seq, &unique_wanted, [&](double d, std::uint64_t ordinal) {
      while (w < wanted.size() && wanted[w] == ordinal) {
        distances.push_back(d);
        ++w;
      }
    });
  }
  report.distance = nearest_rank_percentiles(distances);
  return report;
}

PositionErrorReport position_error_report(const PositionVector& truth,
                                          const PositionVector& recovered,
                                          Orientation orientation) {
  if (truth.size() != recovered.size()) throw ConfigError("position_error_report: size mismatch");
  std::vector<double> err(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double xhat =
        orientation == Orientation::AsIs ? recovered[i] : recovered.n() - recovered[i];
    err[i] = std::abs(xhat - truth[i]);
  }
  PositionErrorReport report;
  report.error = nearest_rank_percentiles(err);
  report.count = err.size();
  return report;
}

EvalReport evaluate(const PositionVector& truth, std::span<const Vertex> order,
                    const InversionOptions& options) {
  EvalReport report;
  report.inversions = inversion_report(truth, order, options);
  const PositionVector xhat = recover_positions(order, truth.n(), truth.size());
  report.position_errors = position_error_report(truth, xhat, report.inversions.orientation);
  return report;
}

void write_report_csv_header(std::ostream& out) {
  out << "metric,p90,p95,p99,max,count,orientation\n";
}

void write_report_csv_rows(std::ostream& out, const EvalReport& report) {
  auto row = [&](std::string_view metric, const Percentiles& p, std::uint64_t count) {
    out << metric << ',' << format_real(p.p90) << ',' << format_real(p.p95) << ','
        << format_real(p.p99) << ',' << format_real(p.max) << ',' << count << ','
        << to_string(report.inversions.orientation) << '\n';
  };
  row("inversion_distance", report.inversions.distance, report.inversions.inversion_count);
  row("position_error", report.position_errors.error, report.position_errors.count);
}

}  // namespace latline
