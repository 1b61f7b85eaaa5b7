#include "latline/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "latline/errors.hpp"
#include "latline/graph_stats.hpp"
#include "latline/io.hpp"
#include "latline/math_kernels.hpp"
#include "latline/parallel.hpp"

namespace latline {

void DistanceWindow::validate(double n) const {
  if (!(std::isfinite(L) && std::isfinite(U) && std::isfinite(delta)) || !(delta > 0.0)) {
    throw ConfigError("window: L, U, delta must be finite with delta > 0");
  }
  if (!(3.0 * delta < L)) throw ConfigError("window: requires 3*delta < L");
  if (!(L < n / 2.0 - 2.0 * delta)) throw ConfigError("window: requires L < n/2 - 2*delta");
  if (!(U > 2.0 * L + 8.0 * delta)) throw ConfigError("window: requires U > 2L + 8*delta");
}

DistanceWindow exponential_window(double delta) {
  return {kExpInversionRange.lo, kExpInversionRange.hi, delta};
}

DistanceWindow linear_window(double delta) { return {0.5, 2.0, delta}; }

NearTable::NearTable(double bound, std::vector<std::size_t> offsets, std::vector<Vertex> ids,
                     std::vector<double> dists)
    : bound_(bound), offsets_(std::move(offsets)), ids_(std::move(ids)), dists_(std::move(dists)) {}

std::ptrdiff_t NearTable::find(Vertex v, Vertex u) const noexcept {
  const auto row = ids(v);
  auto it = std::lower_bound(row.begin(), row.end(), u);
  if (it == row.end() || *it != u) return -1;
  return it - row.begin();
}

DistanceEstimate::DistanceEstimate(EstimatorKind kind, DistanceWindow window, double sentinel,
                                   std::size_t m)
    : kind_(kind), window_(window), sentinel_(sentinel), m_(m) {}

double DistanceEstimate::query(Vertex i, Vertex j) const {
  if (i >= m_ || j >= m_) throw IndexError("DistanceEstimate::query: vertex out of range");
  if (i == j) return 0.0;
  const Vertex a = std::min(i, j);
  const Vertex b = std::max(i, j);
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  Shard& shard = memo_[(key * 0x9e3779b97f4a7c15ULL) >> 58];
  {
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.values.find(key); it != shard.values.end()) return it->second;
  }
  // compute() is a pure function of (a, b): a racing insert stores the same value.
  const double value = compute(a, b);
  std::lock_guard lock(shard.mutex);
  shard.values.emplace(key, value);
  return value;
}

NearTable DistanceEstimate::near_table(double bound, unsigned threads) const {
  const std::size_t m = m_;
  std::vector<std::vector<Vertex>> up_ids(m);
  std::vector<std::vector<double>> up_dists(m);
  parallel_for_chunks(m, threads, 16, [&](std::size_t begin, std::size_t end) {
    auto builder = row_builder();
    for (std::size_t i = begin; i < end; ++i) {
      builder->upper_row(static_cast<Vertex>(i), bound, up_ids[i], up_dists[i]);
    }
  });

  // Symmetrise: row v lists lower partners (ascending, from earlier rows) then
  // its own upper partners.
  std::vector<std::size_t> offsets(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    offsets[i + 1] += up_ids[i].size();
    for (Vertex j : up_ids[i]) offsets[j + 1] += 1;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Vertex> ids(offsets[m]);
  std::vector<double> dists(offsets[m]);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < up_ids[i].size(); ++k) {
      const Vertex j = up_ids[i][k];
      ids[fill[j]] = static_cast<Vertex>(i);
      dists[fill[j]] = up_dists[i][k];
      ++fill[j];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(up_ids[i].begin(), up_ids[i].end(), ids.begin() + fill[i]);
    std::copy(up_dists[i].begin(), up_dists[i].end(), dists.begin() + fill[i]);
    std::vector<Vertex>().swap(up_ids[i]);
    std::vector<double>().swap(up_dists[i]);
  }
  return NearTable(bound, std::move(offsets), std::move(ids), std::move(dists));
}

namespace {

// ---------------------------------------------------------------------------
// Exact oracle

class ExactOracle final : public DistanceEstimate {
public:
  ExactOracle(const PositionVector& x, const DistanceWindow& window)
      : DistanceEstimate(EstimatorKind::ExactOracle, window, x.n(), x.size()),
        x_(x.values().begin(), x.values().end()),
        order_(x.size()) {
    std::iota(order_.begin(), order_.end(), Vertex{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Vertex a, Vertex b) { return x_[a] < x_[b]; });
    sorted_.resize(order_.size());
    for (std::size_t r = 0; r < order_.size(); ++r) sorted_[r] = x_[order_[r]];
  }

protected:
  double compute(Vertex i, Vertex j) const override { return std::abs(x_[i] - x_[j]); }

  class Rows final : public RowBuilder {
  public:
    explicit Rows(const ExactOracle& o) : o_(o) {}
    void upper_row(Vertex i, double bound, std::vector<Vertex>& ids,
                   std::vector<double>& dists) override {
      const double xi = o_.x_[i];
      auto lo = std::lower_bound(o_.sorted_.begin(), o_.sorted_.end(), xi - bound);
      auto hi = std::upper_bound(o_.sorted_.begin(), o_.sorted_.end(), xi + bound);
      ids.clear();
      for (auto it = lo; it != hi; ++it) {
        const Vertex j = o_.order_[static_cast<std::size_t>(it - o_.sorted_.begin())];
        if (j > i && std::abs(xi - o_.x_[j]) <= bound) ids.push_back(j);
      }
      std::sort(ids.begin(), ids.end());
      dists.resize(ids.size());
      for (std::size_t k = 0; k < ids.size(); ++k) dists[k] = std::abs(xi - o_.x_[ids[k]]);
    }

  private:
    const ExactOracle& o_;
  };

  std::unique_ptr<RowBuilder> row_builder() const override { return std::make_unique<Rows>(*this); }

private:
  std::vector<double> x_;
  std::vector<Vertex> order_;
  std::vector<double> sorted_;
};

// ---------------------------------------------------------------------------
// Shared machinery for the graph-backed estimators

class GraphEstimate : public DistanceEstimate {
protected:
  GraphEstimate(EstimatorKind kind, DistanceWindow window, const RandomGraph& g,
                const ModelParams& params, std::size_t m)
      : DistanceEstimate(kind, window, params.n, m), g_(g), params_(params) {
    if (g.vertex_count() != m) throw ConfigError("estimator: m does not match the graph");
    degrees_.resize(m);
    for (std::size_t v = 0; v < m; ++v) degrees_[v] = static_cast<double>(g.degree(static_cast<Vertex>(v)));
  }

  /// d̂ from a common-neighbour count.
  virtual double from_common(Vertex i, Vertex j, double common) const = 0;
  /// Lower bound on d̂ for any pair without common neighbours.
  virtual double floor_without_common() const = 0;
  /// False when a pair with this many common neighbours is certainly above bound.
  virtual bool may_be_within(Vertex, Vertex, double, double) const { return true; }

  double compute(Vertex i, Vertex j) const override {
    return from_common(i, j, static_cast<double>(common_neighbors(g_, i, j)));
  }

  class Rows final : public RowBuilder {
  public:
    explicit Rows(const GraphEstimate& e) : e_(e), counter_(e.vertex_count()) {}
    void upper_row(Vertex i, double bound, std::vector<Vertex>& ids,
                   std::vector<double>& dists) override {
      ids.clear();
      dists.clear();
      counter_.row(e_.g_, i, row_, static_cast<std::int64_t>(i));
      auto emit = [&](Vertex j, double common) {
        if (!e_.may_be_within(i, j, common, bound)) return;
        const double d = e_.from_common(i, j, common);
        if (d <= bound) {
          ids.push_back(j);
          dists.push_back(d);
        }
      };
      if (e_.floor_without_common() > bound) {
        for (auto [j, cnt] : row_) emit(j, static_cast<double>(cnt));
        return;
      }
      auto it = row_.begin();
      for (std::size_t j = i + 1; j < e_.vertex_count(); ++j) {
        double common = 0.0;
        if (it != row_.end() && it->first == j) {
          common = static_cast<double>(it->second);
          ++it;
        }
        emit(static_cast<Vertex>(j), common);
      }
    }

  private:
    const GraphEstimate& e_;
    CommonNeighborCounter counter_;
    std::vector<std::pair<Vertex, std::uint32_t>> row_;
  };

  std::unique_ptr<RowBuilder> row_builder() const override { return std::make_unique<Rows>(*this); }

  const RandomGraph& g_;
  ModelParams params_;
  std::vector<double> degrees_;
};

// ---------------------------------------------------------------------------
// Exponential model

double exp_from_stats(const ModelParams& p, std::size_t m, double deg_i, double deg_j,
                      double common) {
  if (common <= 0.0 || m < 3) return p.n;
  const double w = common * p.n / (p.c * p.c * static_cast<double>(m - 2));
  const double h_i = 2.0 - deg_i * p.n / (p.c * static_cast<double>(m - 1));
  const double h_j = 2.0 - deg_j * p.n / (p.c * static_cast<double>(m - 1));
  // E[w] = g(d) - (e^{-xi-xj} + e^{xi+xj-2n})/2 and h_i h_j ≈ that bracket.
  const double g_hat = w + 0.5 * h_i * h_j;
  return invert_g_exp(g_hat, kExpInversionRange);
}

class ExponentialEstimate final : public GraphEstimate {
public:
  ExponentialEstimate(const RandomGraph& g, const ModelParams& params, std::size_t m,
                      const DistanceWindow& window)
      : GraphEstimate(EstimatorKind::ExponentialModel, window, g, params, m) {}

protected:
  double from_common(Vertex i, Vertex j, double common) const override {
    return exp_from_stats(params_, vertex_count(), degrees_[i], degrees_[j], common);
  }
  double floor_without_common() const override { return params_.n; }

  bool may_be_within(Vertex i, Vertex j, double common, double bound) const override {
    if (bound >= kExpInversionRange.hi || common <= 0.0 || vertex_count() < 3) return true;
    const auto& p = params_;
    const double m = static_cast<double>(vertex_count());
    const double w = common * p.n / (p.c * p.c * (m - 2.0));
    const double h_i = 2.0 - degrees_[i] * p.n / (p.c * (m - 1.0));
    const double h_j = 2.0 - degrees_[j] * p.n / (p.c * (m - 1.0));
    return w + 0.5 * h_i * h_j >= g_exp(std::max(bound, kExpInversionRange.lo)) - 1e-9;
  }
};

// ---------------------------------------------------------------------------
// Linear model

LinearDecision lin_cascade(const ModelParams& p, std::size_t m, double x_i, double x_j,
                           double common, const LinearEstimatorOptions& options) {
  const double eps = p.delta / 20.0;
  const double a_hat =
      m < 3 ? 0.0 : common * p.n / (p.c * p.c * static_cast<double>(m - 2));
  const double lo = std::min(x_i, x_j);
  const double hi = std::max(x_i, x_j);
  if (lo >= 1.0 / eps) return {invert_h_lin(a_hat, kLinInversionRange), 1};
  if (hi > 2.0 / eps + 1.0 && lo < 1.0 / eps) return {p.n, 2};
  if (a_hat < options.same_endpoint_threshold) return {p.n, 3};
  if (hi <= 8.0) return {hi - lo, 4};
  if (hi >= 8.0 && lo <= 5.0) return {p.n, 5};
  // E[a] = h(d) - g(x_i+1, x_j+1) - g(n-x_i+1, n-x_j+1); the far-end term is O(1/n).
  return {invert_h_lin(a_hat + g_log(x_i + 1.0, x_j + 1.0), kLinInversionRange), 6};
}

class LinearEstimate final : public GraphEstimate {
public:
  LinearEstimate(const RandomGraph& g, const ModelParams& params, std::size_t m,
                 const LinearEstimatorOptions& options)
      : GraphEstimate(EstimatorKind::LinearModel, options.window.value_or(linear_window(params.delta)),
                      g, params, m),
        options_(options) {
    endpoints_.resize(m);
    for (std::size_t v = 0; v < m; ++v) endpoints_[v] = endpoint_from_degree(degrees_[v], params, m);
  }

protected:
  double from_common(Vertex i, Vertex j, double common) const override {
    return lin_cascade(params_, vertex_count(), endpoints_[i], endpoints_[j], common, options_).d_hat;
  }
  // Without common neighbours the cascade yields the inversion cap or n.
  double floor_without_common() const override { return std::min(kLinInversionRange.hi, params_.n); }

private:
  LinearEstimatorOptions options_;
  std::vector<double> endpoints_;
};

}  // namespace

std::unique_ptr<DistanceEstimate> exact_oracle(const PositionVector& x, const DistanceWindow& window) {
  window.validate(x.n());
  return std::make_unique<ExactOracle>(x, window);
}

std::unique_ptr<DistanceEstimate> estimate_exp(const RandomGraph& g, const ModelParams& params,
                                               std::size_t m,
                                               const ExponentialEstimatorOptions& options) {
  params.validate();
  if (params.decay != Decay::Exponential) throw ConfigError("estimate_exp: model is not exponential");
  if (g.vertex_count() != m) throw ConfigError("estimate_exp: graph size differs from m");
  const DistanceWindow window = options.window.value_or(exponential_window(params.delta));
  window.validate(params.n);
  return std::make_unique<ExponentialEstimate>(g, params, m, window);
}

double endpoint_from_degree(double degree, const ModelParams& params, std::size_t m) {
  if (m < 2) return 0.0;
  const double a = degree * params.n / (params.c * static_cast<double>(m - 1));
  return std::max(0.0, std::exp(a - std::log(params.n)) - 1.0);
}

double estimate_endpoint_lin(const RandomGraph& g, Vertex i, const ModelParams& params,
                             std::size_t m) {
  params.validate_model();
  return endpoint_from_degree(static_cast<double>(g.degree(i)), params, m);
}

std::unique_ptr<DistanceEstimate> estimate_lin(const RandomGraph& g, const ModelParams& params,
                                               std::size_t m, const LinearEstimatorOptions& options) {
  params.validate();
  if (params.decay != Decay::Linear) throw ConfigError("estimate_lin: model is not linear");
  if (!(options.same_endpoint_threshold > 0.0)) throw ConfigError("tau_same must be > 0");
  if (g.vertex_count() != m) throw ConfigError("estimate_lin: graph size differs from m");
  options.window.value_or(linear_window(params.delta)).validate(params.n);
  return std::make_unique<LinearEstimate>(g, params, m, options);
}

double exp_distance_from_stats(const ModelParams& params, std::size_t m, double degree_i,
                               double degree_j, double common) {
  return exp_from_stats(params, m, degree_i, degree_j, common);
}

LinearDecision lin_distance_from_stats(const ModelParams& params, std::size_t m, double degree_i,
                                       double degree_j, double common,
                                       const LinearEstimatorOptions& options) {
  return lin_cascade(params, m, endpoint_from_degree(degree_i, params, m),
                     endpoint_from_degree(degree_j, params, m), common, options);
}

void write_distance_csv(std::ostream& out, const NearTable& table) {
  out << "i,j,d_hat\n";
  for (std::size_t v = 0; v < table.vertex_count(); ++v) {
    const auto ids = table.ids(static_cast<Vertex>(v));
    const auto ds = table.dists(static_cast<Vertex>(v));
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] > v) out << v << ',' << ids[k] << ',' << format_real(ds[k]) << '\n';
    }
  }
}

}  // namespace latline
