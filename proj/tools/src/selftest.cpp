#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "latline/distance.hpp"
#include "latline/distinguish.hpp"
#include "latline/math_kernels.hpp"
#include "latline/order_recovery.hpp"
#include "latline/position_eval.hpp"
#include "latline/rng.hpp"
#include "latline_cli/commands.hpp"

namespace latline::cli {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

struct Check {
  std::string name;
  std::function<bool(std::uint64_t, unsigned)> run;
};

std::vector<Check> checks() {
  return {
      {"g_exp inversion round-trip",
       [](std::uint64_t seed, unsigned) {
         for (std::uint64_t s = 0; s < 10000; ++s) {
           const double d = 0.3 + 2.2 * uniform_at(seed, Stream::Sampling, s);
           if (std::abs(invert_g_exp(g_exp(d), kExpInversionRange) - d) > 1e-9) return false;
         }
         return true;
       }},
      {"h_lin inversion round-trip",
       [](std::uint64_t seed, unsigned) {
         for (std::uint64_t s = 0; s < 10000; ++s) {
           const double d = 0.3 + 1.7 * uniform_at(seed, Stream::Sampling, s);
           if (std::abs(invert_h_lin(h_lin(d), kLinInversionRange) - d) > 1e-9) return false;
         }
         return true;
       }},
      {"degree density matches quadrature",
       [](std::uint64_t, unsigned) {
         for (Decay decay : {Decay::Exponential, Decay::Linear}) {
           const ModelParams p{25.0, 0.8, decay, 0.05};
           for (double x : {0.0, 3.3, 12.5, 24.0}) {
             const double q = simpson([&](double y) { return edge_probability(p, std::abs(x - y)); }, 0.0, x, 2000) +
                              simpson([&](double y) { return edge_probability(p, std::abs(x - y)); }, x, 25.0, 2000);
             if (std::abs(q / 25.0 - expected_degree_density(p, x)) > 1e-9) return false;
           }
         }
         return true;
       }},
      {"oracle recovery on a grid",
       [](std::uint64_t, unsigned threads) {
         std::vector<double> v;
         for (int k = 0; k <= 30; ++k) v.push_back(0.1 * k);
         const PositionVector x(3.0, v);
         const auto est = exact_oracle(x, {0.3, 2.5, 0.05});
         const auto r = recover_order(*est, x.size(), {.threads = threads});
         std::vector<Vertex> up(x.size());
         std::iota(up.begin(), up.end(), Vertex{0});
         std::vector<Vertex> down(up.rbegin(), up.rend());
         return r.order == up || r.order == down;
       }},
      {"fast inversion count equals pair scan",
       [](std::uint64_t seed, unsigned) {
         const ModelParams p;
         const PositionVector x = sample_positions(300, p, seed);
         std::vector<Vertex> order(300);
         std::iota(order.begin(), order.end(), Vertex{0});
         const auto c = count_inversions(x, order);
         std::uint64_t as_is = 0, refl = 0;
         for (std::size_t a = 0; a < 300; ++a)
           for (std::size_t b = a + 1; b < 300; ++b) {
             as_is += x[order[a]] > x[order[b]];
             refl += x[order[a]] < x[order[b]];
           }
         return c.as_is == as_is && c.reflected == refl;
       }},
      {"expected L is non-negative and matches the likelihood difference",
       [](std::uint64_t seed, unsigned) {
         const PositionVector x = sample_sorted_positions(60, 10.0, seed);
         const HypothesisPair pair = construct_scaled(x, 0.5);
         if (!(expected_l(pair) > 0.0)) return false;
         if (expected_l(construct_scaled(x, 0.0)) != 0.0) return false;
         const ModelParams p{10.0, 1.0, Decay::Exponential, 0.05};
         const RandomGraph g = sample_graph(x, p, seed + 1, {.threads = 1});
         const double direct = log_likelihood(pair.X, g, p) - log_likelihood(pair.Y, g, p);
         return std::abs(l_statistic(pair, g) - direct) <= 1e-9 * std::max(1.0, std::abs(direct));
       }},
      {"d' triangle inequality",
       [](std::uint64_t seed, unsigned) {
         const PositionVector x = sample_sorted_positions(80, 10.0, seed);
         return check_dprime_triangle(construct_scaled(x, 0.5)) &&
                check_dprime_triangle(random_order_preserving(x, 0.5, seed + 7));
       }},
      {"graph sampling independent of threads",
       [](std::uint64_t seed, unsigned) {
         const ModelParams p;
         const PositionVector x = sample_positions(500, p, seed);
         return sample_graph(x, p, seed, {.threads = 1}) == sample_graph(x, p, seed, {.threads = 4});
       }},
  };
}

}  // namespace

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  int failures = 0;
  for (const auto& c : checks()) {
    bool ok = false;
    try {
      ok = c.run(cfg.seed, cfg.threads);
    } catch (const std::exception& e) {
      out << "ERROR " << c.name << ": " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << '\n';
    failures += ok ? 0 : 1;
  }
  return failures;
}

}  // namespace latline::cli
