// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   latline_acceptance               run all criteria
//   latline_acceptance --criterion N run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latline/distance.hpp"
#include "latline/distinguish.hpp"
#include "latline/math_kernels.hpp"
#include "latline/model.hpp"
#include "latline/order_recovery.hpp"
#include "latline/position_eval.hpp"
#include "latline/rng.hpp"
#include "latline_cli/commands.hpp"
#include "support/quadrature.hpp"

namespace {

using namespace latline;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("latline_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "latline");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::vector<Vertex> true_order(const PositionVector& x) {
  std::vector<Vertex> o(x.size());
  std::iota(o.begin(), o.end(), Vertex{0});
  std::stable_sort(o.begin(), o.end(), [&](Vertex a, Vertex b) { return x[a] < x[b]; });
  return o;
}

// Closed-form densities against adaptive quadrature, both decay models.
Verdict criterion_1() {
  double worst = 0.0;
  std::mt19937_64 rng(1);
  for (Decay d : {Decay::Exponential, Decay::Linear}) {
    for (double c : {1.0, 0.6}) {
      const ModelParams p{25.0, c, d, 0.05};
      std::uniform_real_distribution<double> u(0.0, p.n);
      for (int k = 0; k < 100; ++k) {
        const double x = p.n * k / 99.0;
        worst = std::max(worst, std::abs(expected_degree_density(p, x) - testing::degree_density_by_quadrature(p, x)));
        const double a = u(rng), b = k % 10 == 0 ? a : u(rng);
        worst = std::max(worst,
                         std::abs(expected_common_density(p, a, b) - testing::common_density_by_quadrature(p, a, b)));
      }
    }
  }
  return {worst <= 1e-9, "max abs difference " + fmt(worst)};
}

// Kernel inequalities, monotonicity, slopes and inversions on 1e5 samples each.
Verdict criterion_2() {
  constexpr int kN = 100000;
  std::mt19937_64 rng(2);
  std::vector<std::string> failed;
  auto check = [&](const std::string& name, const std::function<bool(std::mt19937_64&)>& ok) {
    for (int s = 0; s < kN; ++s)
      if (!ok(rng)) {
        failed.push_back(name);
        return;
      }
  };
  auto uniform = [](std::mt19937_64& r, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(r); };

  check("neg-log-bracket", [&](auto& r) {
    const double x = uniform(r, 1e-4, 0.5), v = -std::log1p(-x);
    return x + x * x / 2 < v && v < x + x * x;
  });
  check("exp-ratio", [&](auto& r) {
    const double x = uniform(r, 1e-3, 20), xp = x * uniform(r, 1e-6, 1), den = -std::expm1(-x);
    return std::exp(-x) * std::expm1(xp) / den <= xp / x * (1 + 1e-12) &&
           std::exp(-x) * -std::expm1(-xp) / den <= xp / x * (1 + 1e-12);
  });
  check("one-minus-exp-sublinear", [&](auto& r) {
    const double x = uniform(r, 1e-3, 20), y = x / uniform(r, 1e-3, 1);
    return y <= x || -std::expm1(-y) / -std::expm1(-x) < y / x;
  });
  check("g-log-between-reciprocals", [&](auto& r) {
    const double a = uniform(r, 1e-3, 1e3), b = uniform(r, 1e-3, 1e3), v = g_log(a, b);
    return v >= 1 / std::max(a, b) * (1 - 1e-12) && v <= 1 / std::min(a, b) * (1 + 1e-12);
  });
  check("g-log-perturbation", [&](auto& r) {
    double a = uniform(r, 4, 1000), b = uniform(r, 4, 1000);
    if (a > b) std::swap(a, b);
    const double eps = uniform(r, 0, 0.5);
    const double a2 = a * (1 + eps * uniform(r, -1, 1) * 0.999999);
    const double b2 = b * (1 + eps * uniform(r, -1, 1) * 0.999999);
    if (a == b || a2 == b2) return true;
    return std::abs(g_log(a, b) - g_log(a2, b2)) < std::max(eps, 1e-15);
  });
  check("g-exp-decreasing-slope", [&](auto& r) {
    const double x = uniform(r, 0.3, 2.5 - 1e-6), h = 1e-6;
    return g_exp(x + h) < g_exp(x) && (g_exp(x + h) - g_exp(x)) / h < -0.2;
  });
  check("h-lin-decreasing-slope", [&](auto& r) {
    const double x = uniform(r, 0.5, 2.0 - 1e-6), h = 1e-6;
    return h_lin(x + h) < h_lin(x) && (h_lin(x + h) - h_lin(x)) / h < -0.1;
  });
  check("g-exp-round-trip", [&](auto& r) {
    const double d = uniform(r, 0.3, 2.5);
    return std::abs(invert_g_exp(g_exp(d), kExpInversionRange) - d) <= 1e-9;
  });
  check("h-lin-round-trip", [&](auto& r) {
    const double d = uniform(r, 0.3, 2.0);
    return std::abs(invert_h_lin(h_lin(d), kLinInversionRange) - d) <= 1e-9;
  });
  check("log1m-exp-accuracy", [&](auto& r) {
    const double d = std::exp(uniform(r, std::log(1e-12), std::log(700.0)));
    const long double ld = d;
    const double ref = static_cast<double>(d > 1 ? std::log1p(-std::exp(-ld)) : std::log(-std::expm1(-ld)));
    return std::abs(log1m_exp_neg(d) - ref) <= 1e-12 * std::abs(ref);
  });

  std::string detail = failed.empty() ? "10 properties x 1e5 samples" : "failed:";
  for (const auto& f : failed) detail += " " + f;
  return {failed.empty(), detail};
}

// Exact-oracle recovery never inverts pairs farther apart than 3δ.
Verdict criterion_3() {
  const ModelParams p{25.0, 1.0, Decay::Exponential, 0.05};
  const DistanceWindow w{0.3, 2.5, 0.05};
  int bad = 0;
  double worst = 0.0;
  std::string first_error;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = sample_positions(2000, p, derive_seed(3, Stream::Trials, seed));
    try {
      const auto r = recover_order(*exact_oracle(x, w), 2000);
      const double far = inversion_report(x, r.order).distance.max;
      worst = std::max(worst, far);
      bad += far > 0.15;
    } catch (const std::exception& e) {
      ++bad;
      if (first_error.empty()) first_error = e.what();
    }
  }
  std::string detail = "failing seeds " + std::to_string(bad) + "/100, max inverted distance " + fmt(worst);
  if (!first_error.empty()) detail += ", error: " + first_error;
  return {bad == 0, detail};
}

// Estimators fed exact expected statistics.
Verdict criterion_4() {
  const ModelParams pe{25.0, 1.0, Decay::Exponential, 0.05};
  double worst_exp = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double d = 0.3 + 2.2 * k / 49.0, xi = 8.0, xj = 8.0 + d;
    const std::size_t m = 10000;
    const double dh = exp_distance_from_stats(pe, m, (m - 1) * expected_degree_density(pe, xi),
                                              (m - 1) * expected_degree_density(pe, xj),
                                              (m - 2) * expected_common_density(pe, xi, xj));
    worst_exp = std::max(worst_exp, std::abs(dh - d));
  }
  const ModelParams pl{1000.0, 1.0, Decay::Linear, 0.099};
  double worst_lin = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double d = 0.3 + 1.7 * k / 49.0, xi = 450.0, xj = 450.0 + d;
    const std::size_t m = 100000;
    const auto r = lin_distance_from_stats(pl, m, (m - 1) * expected_degree_density(pl, xi),
                                           (m - 1) * expected_degree_density(pl, xj),
                                           (m - 2) * expected_common_density(pl, xi, xj));
    worst_lin = std::max(worst_lin, std::abs(r.d_hat - d));
  }
  return {worst_exp <= 1e-6 && worst_lin <= 0.05,
          "exponential max error " + fmt(worst_exp) + ", linear max error " + fmt(worst_lin)};
}

// Figure pipeline on sampled graphs at m = 10000 and m = 20000.
Verdict criterion_5() {
  cli::RunConfig cfg;
  cfg.n = 25;
  cfg.c = 1;
  cfg.model = Decay::Exponential;
  cfg.delta = 0.05;
  cfg.graphs = 5;
  cfg.m_grid = {10000, 20000};
  cfg.seed = 1;
  cfg.out = scratch_dir("figure").string();
  std::ostringstream log;
  try {
    const auto rows = cli::cmd_reproduce_figure(cfg, log);
    const double p10 = rows.at(0).inversion.p95, p20 = rows.at(1).inversion.p95;
    return {p10 < 0.1 && p20 <= p10, "average p95 inversion distance m=10000: " + fmt(p10) + ", m=20000: " + fmt(p20)};
  } catch (const std::exception& e) {
    return {false, std::string("pipeline failed: ") + e.what()};
  }
}

// True order through position recovery stays within 2δ.
Verdict criterion_6() {
  const ModelParams p{4.0, 1.0, Decay::Exponential, 0.05};
  const double delta = 0.5;
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = sample_positions(500, p, derive_seed(6, Stream::Trials, seed));
    const auto xhat = recover_positions(true_order(x), p.n, x.size());
    const double e = position_error_report(x, xhat, Orientation::AsIs).error.max;
    worst = std::max(worst, e);
    ok += e < 2 * delta;
  }
  return {ok >= 95, std::to_string(ok) + "/100 seeds within 2*delta, worst " + fmt(worst)};
}

// Below the lower bound the exact divergence stays under 1.
Verdict criterion_7() {
  const auto s = run_distinguish_trials(100, 99, 0.5, 100, 7);
  int ok = 0;
  double worst = 0.0;
  for (const auto& t : s.outcomes) {
    ok += t.expected_L < 1.0;
    worst = std::max(worst, t.expected_L);
  }
  return {ok >= 95, std::to_string(ok) + "/100 trials with E[L] < 1, max " + fmt(worst)};
}

// Above the upper bound the likelihood ratio favours the truth.
Verdict criterion_8() {
  DistinguishOptions o;
  o.forced_truth = Hypothesis::FromX;
  const auto s = run_distinguish_trials(25, 2000, 0.5, 100, 8, o);
  int ok = 0;
  for (const auto& t : s.outcomes) ok += t.L > 0.0;
  return {ok >= 95, std::to_string(ok) + "/100 trials with L > 0, mean E[L] " + fmt(s.mean_expected_l)};
}

// Tester error shrinks as m grows.
Verdict criterion_9() {
  const auto lo = run_distinguish_trials(400, 200, 1.0, 200, 9);
  const auto hi = run_distinguish_trials(400, 3200, 1.0, 200, 9);
  const double se = std::sqrt(lo.error_rate * (1 - lo.error_rate) / 200 + hi.error_rate * (1 - hi.error_rate) / 200);
  const double gap = lo.error_rate - hi.error_rate;
  return {gap >= 2 * se, "error m=200: " + fmt(lo.error_rate) + ", m=3200: " + fmt(hi.error_rate) +
                             ", gap " + fmt(gap) + ", 2 SE " + fmt(2 * se)};
}

// Per-pair divergence against Monte Carlo and the per-pair upper bound.
Verdict criterion_10() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ud(0.1, 5.0), uf(0.01, 0.5);
  int mc_ok = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double d = ud(rng), dp = d * uf(rng), dy = d - dp;
    const double exact = pair_expected_l(d, dy), p = std::exp(-d);
    const std::size_t draws = 1'000'000;
    double sum = 0, sq = 0;
    for (std::size_t s = 0; s < draws; ++s) {
      const double l = pair_l_term(d, dy, uniform_at(10 + k, Stream::Edges, s) < p);
      sum += l;
      sq += l * l;
    }
    const double mean = sum / draws, se = std::sqrt((sq / draws - mean * mean) / draws);
    const double z = std::abs(mean - exact) / se;
    worst_z = std::max(worst_z, z);
    mc_ok += z <= 3.0;
  }
  int bound_ok = 0;
  for (int k = 0; k < 100; ++k) {
    const double d = 0.1 + 4.9 * k / 99.0, dp = 2 * 1.0 * d / 25.0;
    bound_ok += pair_expected_l(d, d - dp) < std::exp(-d) * (dp * dp + 2 * dp * dp / d);
  }
  return {mc_ok == 20 && bound_ok == 100, "Monte Carlo " + std::to_string(mc_ok) + "/20 within 3 SE (max z " +
                                              fmt(worst_z) + "), bound " + std::to_string(bound_ok) + "/100"};
}

// d′ triangle inequality on random order-preserving pairs.
Verdict criterion_11() {
  int ok = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto X = sample_sorted_positions(500, 25, derive_seed(11, Stream::Trials, k));
    ok += check_dprime_triangle(random_order_preserving(X, 1.0, derive_seed(11, Stream::Sampling, k)), k, 100, 100000);
  }
  return {ok == 20, std::to_string(ok) + "/20 pairs hold on 1e5 triples"};
}

// generate and recover outputs are identical across runs and thread counts.
// Every recover run reads the same input paths, since outputs echo them.
Verdict criterion_12() {
  const auto dir = scratch_dir("determinism");
  const std::vector<std::string> runs = {"t1a", "t1b", "t8a", "t8b"};
  const std::string input = (dir / "g_t1a").string();
  for (const auto& r : runs) {
    const std::string threads = r.substr(1, 1);
    if (run_cli({"generate", "--m", "400", "--seed", "12", "--threads", threads, "--out", (dir / ("g_" + r)).string()}) != 0)
      return {false, "generate failed in " + r};
  }
  for (const auto& r : runs) {
    const std::string threads = r.substr(1, 1);
    if (run_cli({"recover", "--graph", input + "/graph.txt", "--truth", input + "/positions.txt", "--scores",
                 "--threads", threads, "--out", (dir / ("r_" + r)).string()}) != 0)
      return {false, "recover failed in " + r};
  }
  std::vector<std::string> differing;
  auto compare = [&](const std::string& prefix, std::initializer_list<const char*> files) {
    for (const char* f : files) {
      const auto ref = slurp(dir / (prefix + runs[0]) / f);
      for (std::size_t k = 1; k < runs.size(); ++k)
        if (ref.empty() || slurp(dir / (prefix + runs[k]) / f) != ref) differing.push_back(prefix + runs[k] + "/" + f);
    }
  };
  compare("g_", {"positions.txt", "graph.txt"});
  compare("r_", {"order.txt", "recovered_positions.txt", "scores.csv", "report.csv"});
  fs::remove_all(dir);
  std::string detail = differing.empty() ? "6 files identical across 2 runs x threads {1, 8}" : "differ:";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty(), detail};
}

const std::vector<std::pair<std::string, std::function<Verdict()>>> kCriteria = {
    {"closed-form densities match quadrature", criterion_1},
    {"math kernel property suite", criterion_2},
    {"exact-oracle order recovery, 100 seeds", criterion_3},
    {"estimator inversion on exact statistics", criterion_4},
    {"figure percentiles at m=10000 and m=20000", criterion_5},
    {"position error from the true order", criterion_6},
    {"divergence below the lower-bound regime", criterion_7},
    {"likelihood ratio above the upper-bound regime", criterion_8},
    {"tester error decreases with m", criterion_9},
    {"per-pair divergence identities", criterion_10},
    {"d' triangle inequality", criterion_11},
    {"generate and recover determinism", criterion_12},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      const long k = std::strtol(argv[++a], nullptr, 10);
      if (k < 1 || k > static_cast<long>(kCriteria.size())) {
        std::cerr << "criterion must be in 1.." << kCriteria.size() << '\n';
        return 2;
      }
      selected.push_back(static_cast<std::size_t>(k));
    } else {
      std::cerr << "usage: latline_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (std::size_t k = 1; k <= kCriteria.size(); ++k) selected.push_back(k);

  int failures = 0;
  for (std::size_t k : selected) {
    const auto& [name, fn] = kCriteria[k - 1];
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << name << " (" << v.detail << ", "
              << fmt(secs) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
