#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "latline/model.hpp"

namespace latline {

/// (L, U, delta) accuracy window of an approximate distance function.
struct DistanceWindow {
  double L = 0.3;
  double U = 2.5;
  double delta = 0.05;

  /// Requires 3δ < L < n/2 − 2δ and U > 2L + 8δ.
  void validate(double n) const;

  /// Flank band [L + δ, 2L + 7δ] used by order recovery.
  double flank_lo() const noexcept { return L + delta; }
  double flank_hi() const noexcept { return 2.0 * L + 7.0 * delta; }
};

/// Windows the two model estimators guarantee.
DistanceWindow exponential_window(double delta);
DistanceWindow linear_window(double delta);

enum class EstimatorKind { ExactOracle, ExponentialModel, LinearModel };

/// Per-vertex sorted lists of (other vertex, d̂) for all pairs with d̂ <= bound.
class NearTable {
public:
  NearTable() = default;
  NearTable(double bound, std::vector<std::size_t> offsets, std::vector<Vertex> ids,
            std::vector<double> dists);

  double bound() const noexcept { return bound_; }
  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t entry_count() const noexcept { return ids_.size(); }

  std::span<const Vertex> ids(Vertex v) const noexcept {
    return {ids_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> dists(Vertex v) const noexcept {
    return {dists_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  /// Flat index of entry (v, slot) into the global arrays.
  std::size_t offset(Vertex v) const noexcept { return offsets_[v]; }

  /// Slot of `u` in row `v`, or -1 when d̂(v, u) > bound.
  std::ptrdiff_t find(Vertex v, Vertex u) const noexcept;

private:
  double bound_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> ids_;
  std::vector<double> dists_;
};

/// Approximate pairwise distance function d̂(i, j). Symmetric, non-negative,
/// d̂(i, i) = 0. Query results are memoised; queries are thread-safe.
class DistanceEstimate {
public:
  virtual ~DistanceEstimate() = default;
  DistanceEstimate(const DistanceEstimate&) = delete;
  DistanceEstimate& operator=(const DistanceEstimate&) = delete;

  EstimatorKind kind() const noexcept { return kind_; }
  const DistanceWindow& window() const noexcept { return window_; }
  /// The "far" value returned for pairs judged beyond the window (= n).
  double sentinel() const noexcept { return sentinel_; }
  std::size_t vertex_count() const noexcept { return m_; }

  double query(Vertex i, Vertex j) const;

  /// All pairs with d̂ <= bound. Rows are built in parallel; the result does
  /// not depend on `threads`.
  NearTable near_table(double bound, unsigned threads = 0) const;

protected:
  DistanceEstimate(EstimatorKind kind, DistanceWindow window, double sentinel, std::size_t m);

  /// Produces row i of the near table restricted to j > i, sorted by j.
  /// One instance per worker thread.
  class RowBuilder {
  public:
    virtual ~RowBuilder() = default;
    virtual void upper_row(Vertex i, double bound, std::vector<Vertex>& ids,
                           std::vector<double>& dists) = 0;
  };

  /// Uncached d̂ for i != j.
  virtual double compute(Vertex i, Vertex j) const = 0;
  virtual std::unique_ptr<RowBuilder> row_builder() const = 0;

private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> values;
  };

  EstimatorKind kind_;
  DistanceWindow window_;
  double sentinel_;
  std::size_t m_;
  mutable std::array<Shard, kShards> memo_;
};

/// d̂(i, j) = |x_i − x_j|.
std::unique_ptr<DistanceEstimate> exact_oracle(const PositionVector& x, const DistanceWindow& window);

struct ExponentialEstimatorOptions {
  /// Replaces the default (0.3, 2.5, δ) window handed to order recovery.
  std::optional<DistanceWindow> window;
};

/// Common-neighbour estimator for the exponential model, window (0.3, 2.5, δ).
/// `g` must outlive the returned estimate.
std::unique_ptr<DistanceEstimate> estimate_exp(const RandomGraph& g, const ModelParams& params,
                                               std::size_t m,
                                               const ExponentialEstimatorOptions& options = {});

/// Endpoint estimate x̂ ≈ min(x_i, n − x_i) from the degree (linear model),
/// floored at 0.
double estimate_endpoint_lin(const RandomGraph& g, Vertex i, const ModelParams& params,
                             std::size_t m);
/// Same formula from an explicit degree; lets callers feed exact expectations.
double endpoint_from_degree(double degree, const ModelParams& params, std::size_t m);

inline constexpr double kDefaultSameEndpointThreshold = 0.1;

struct LinearEstimatorOptions {
  /// â below this means "opposite endpoints".
  double same_endpoint_threshold = kDefaultSameEndpointThreshold;
  /// Replaces the default (0.5, 2, δ) window handed to order recovery.
  std::optional<DistanceWindow> window;
};

/// Decision-cascade estimator for the linear model, window (0.5, 2, δ).
/// `g` must outlive the returned estimate.
std::unique_ptr<DistanceEstimate> estimate_lin(const RandomGraph& g, const ModelParams& params,
                                               std::size_t m,
                                               const LinearEstimatorOptions& options = {});

/// Estimator formulas evaluated on supplied statistics instead of graph
/// counts. Used for deterministic checks against exact expectations.
double exp_distance_from_stats(const ModelParams& params, std::size_t m, double degree_i,
                               double degree_j, double common);

/// Branch taken by the linear cascade (1-based, matching its documentation).
struct LinearDecision {
  double d_hat;
  int branch;
};
LinearDecision lin_distance_from_stats(const ModelParams& params, std::size_t m,
                                       double degree_i, double degree_j, double common,
                                       const LinearEstimatorOptions& options = {});

/// CSV dump `i,j,d_hat` of every pair in the table with i < j.
void write_distance_csv(std::ostream& out, const NearTable& table);

}  // namespace latline
