#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>

#include "latline/model.hpp"
#include "latline/order_recovery.hpp"

namespace latline {

enum class Orientation { AsIs, Reflected };
std::string_view to_string(Orientation o) noexcept;

/// Nearest-rank percentiles: the p-th is v[ceil(p/100 * N) - 1] of the sorted
/// sample. All zero for an empty sample.
struct Percentiles {
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};
Percentiles nearest_rank_percentiles(std::span<const double> sample);

/// Rank r (1-based) in `order` receives position r * n / m.
PositionVector recover_positions(std::span<const Vertex> order, double n, std::size_t m);
PositionVector recover_positions(const OrderResult& order, double n, std::size_t m);

/// Inversions of `order` against `truth` for both orientations.
struct InversionCounts {
  std::uint64_t as_is = 0;
  std::uint64_t reflected = 0;
};
/// O(m log m) with a Fenwick tree. Pairs at equal true position never count.
InversionCounts count_inversions(const PositionVector& truth, std::span<const Vertex> order);

inline constexpr std::uint64_t kInvertedPairCap = 10'000'000;

struct InversionOptions {
  /// Above this many inverted pairs the distance sample is drawn uniformly
  /// from them instead of enumerated.
  std::uint64_t pair_cap = kInvertedPairCap;
  std::uint64_t sample_size = 1'000'000;
  std::uint64_t seed = 0;
};

struct InversionReport {
  Percentiles distance;
  std::uint64_t inversion_count = 0;
  Orientation orientation = Orientation::AsIs;
  /// True when percentiles come from the uniform sample.
  bool sampled = false;
};

/// Chooses the orientation with fewer inversions (ties: AsIs) and reports
/// true-distance percentiles over the inverted pairs.
InversionReport inversion_report(const PositionVector& truth, std::span<const Vertex> order,
                                 const InversionOptions& options = {});

struct PositionErrorReport {
  Percentiles error;
  std::size_t count = 0;
};

/// Percentiles of |x̂_i − x_i|, using n − x̂_i when Reflected.
PositionErrorReport position_error_report(const PositionVector& truth,
                                          const PositionVector& recovered,
                                          Orientation orientation);

struct EvalReport {
  InversionReport inversions;
  PositionErrorReport position_errors;
};

EvalReport evaluate(const PositionVector& truth, std::span<const Vertex> order,
                    const InversionOptions& options = {});

/// CSV `metric,p90,p95,p99,max,count,orientation`, one row per metric.
void write_report_csv_header(std::ostream& out);
void write_report_csv_rows(std::ostream& out, const EvalReport& report);

}  // namespace latline
