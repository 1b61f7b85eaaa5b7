#include "latline_cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ios>
#include <map>
#include <ostream>
#include <string>

#include "latline/distance.hpp"
#include "latline/errors.hpp"
#include "latline/io.hpp"
#include "latline/order_recovery.hpp"
#include "latline/rng.hpp"

namespace latline::cli {

namespace {

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  return std::filesystem::path(cfg.out) / name;
}

std::ofstream open_csv(const RunConfig& cfg, const std::string& name) {
  const auto path = out_path(cfg, name);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  for (const auto& line : describe(cfg)) f << "# " << line << '\n';
  return f;
}

void finish(std::ofstream& f, const std::string& what) {
  f.flush();
  if (!f) throw std::ios_base::failure("write failed: " + what);
}

std::unique_ptr<DistanceEstimate> model_estimate(const RunConfig& cfg, const ModelParams& params,
                                                 const RandomGraph& g) {
  if (params.decay == Decay::Exponential) {
    return estimate_exp(g, params, g.vertex_count(), {.window = cfg.window()});
  }
  return estimate_lin(g, params, g.vertex_count(),
                      {.same_endpoint_threshold = cfg.tau_same, .window = cfg.window()});
}

std::uint64_t positions_seed(std::uint64_t seed) { return seed; }
std::uint64_t edges_seed(std::uint64_t seed) { return derive_seed(seed, Stream::Edges, 0); }

}  // namespace

void cmd_generate(const RunConfig& cfg) {
  const ModelParams params = cfg.params();
  params.validate();
  const PositionVector x = sample_positions(cfg.m, params, positions_seed(cfg.seed));
  const RandomGraph g =
      sample_graph(x, params, edges_seed(cfg.seed), {.threads = cfg.threads, .cutoff = cfg.cutoff});
  write_positions_file(out_path(cfg, "positions.txt").string(), x);
  write_graph_file(out_path(cfg, "graph.txt").string(),
                   {cfg.n, cfg.m, cfg.model, cfg.c, cfg.seed}, g);
}

void cmd_recover(const RunConfig& cfg, std::ostream& log) {
  if (cfg.graph.empty()) throw ConfigError("recover: --graph is required");
  const GraphFile file = read_graph_file(cfg.graph);
  if (file.header.decay != cfg.model) {
    throw ConfigError("recover: graph model '" + std::string(to_string(file.header.decay)) +
                      "' does not match configured model '" + std::string(to_string(cfg.model)) + "'");
  }
  if (file.header.c != cfg.c) {
    throw ConfigError("recover: graph c=" + format_real(file.header.c) +
                      " does not match configured c=" + format_real(cfg.c));
  }
  ModelParams params = cfg.params();
  params.n = file.header.n;
  const std::size_t m = file.header.m;

  std::optional<PositionVector> truth;
  if (!cfg.truth.empty()) {
    truth = read_positions_file(cfg.truth);
    if (truth->size() != m) throw ConfigError("recover: truth file has a different vertex count");
  }

  OrderResult result;
  if (m > 0) {
    const auto est = model_estimate(cfg, params, file.graph);
    result = recover_order(*est, m, {.threads = cfg.threads});
  }
  const PositionVector xhat = recover_positions(result.order, params.n, m);
  {
    std::ofstream f(out_path(cfg, "order.txt"), std::ios::binary);
    write_order(f, result);
    finish(f, "order.txt");
  }
  write_positions_file(out_path(cfg, "recovered_positions.txt").string(), xhat);
  if (cfg.scores) {
    auto f = open_csv(cfg, "scores.csv");
    write_scores_csv(f, result);
    finish(f, "scores.csv");
  }
  log << "recovered order of " << m << " vertices; oriented edges " << result.oriented_graph_size
      << ", components " << result.component_count << '\n';
  if (truth) {
    const EvalReport report = evaluate(*truth, result.order);
    auto f = open_csv(cfg, "report.csv");
    write_report_csv_header(f);
    write_report_csv_rows(f, report);
    finish(f, "report.csv");
    log << "inversions " << report.inversions.inversion_count << ", p95 inverted distance "
        << format_real(report.inversions.distance.p95) << '\n';
  }
}

void cmd_estimate(const RunConfig& cfg) {
  if (cfg.graph.empty()) throw ConfigError("estimate: --graph is required");
  const GraphFile file = read_graph_file(cfg.graph);
  if (file.header.decay != cfg.model) throw ConfigError("estimate: graph model does not match configured model");
  if (file.header.c != cfg.c) throw ConfigError("estimate: graph c does not match configured c");
  ModelParams params = cfg.params();
  params.n = file.header.n;
  auto f = open_csv(cfg, "distances.csv");
  if (file.header.m == 0) {
    write_distance_csv(f, NearTable(0.0, {0}, {}, {}));
  } else {
    const auto est = model_estimate(cfg, params, file.graph);
    write_distance_csv(f, est->near_table(est->window().U, cfg.threads));
  }
  finish(f, "distances.csv");
}

EvalReport run_figure_pipeline(const RunConfig& cfg, std::size_t m, std::size_t graph_index) {
  ModelParams params = cfg.params();
  const std::uint64_t s = derive_seed(derive_seed(cfg.seed, Stream::Trials, m), Stream::Trials, graph_index);
  const PositionVector x = sample_positions(m, params, positions_seed(s));
  const RandomGraph g = sample_graph(x, params, edges_seed(s), {.threads = cfg.threads, .cutoff = cfg.cutoff});
  const auto est = model_estimate(cfg, params, g);
  const OrderResult result = recover_order(*est, m, {.threads = cfg.threads});
  return evaluate(x, result.order, {.seed = s});
}

std::vector<FigureRow> cmd_reproduce_figure(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model != Decay::Exponential || cfg.c != 1.0)
    throw ConfigError("reproduce-figure: requires model=exp and c=1");
  if (cfg.graphs == 0) throw ConfigError("reproduce-figure: graphs must be >= 1");
  cfg.params().validate();
  const auto& grid = cfg.m_grid.empty() ? kDefaultFigureGrid : cfg.m_grid;
  std::vector<FigureRow> rows;
  for (std::size_t m : grid) {
    FigureRow row;
    row.m = m;
    row.graphs = cfg.graphs;
    for (std::size_t gi = 0; gi < cfg.graphs; ++gi) {
      EvalReport rep;
      try {
        rep = run_figure_pipeline(cfg, m, gi);
      } catch (const EmptyAnchorSetError& e) {
        log << "m=" << m << " graph " << gi << ": " << e.what() << '\n';
        if (!cfg.keep_going) throw;
        continue;
      }
      ++row.completed;
      auto acc = [](Percentiles& a, const Percentiles& b) {
        a.p90 += b.p90;
        a.p95 += b.p95;
        a.p99 += b.p99;
        a.max += b.max;
      };
      acc(row.inversion, rep.inversions.distance);
      acc(row.position, rep.position_errors.error);
      log << "m=" << m << " graph " << gi << ": inversions " << rep.inversions.inversion_count
          << ", p95 " << format_real(rep.inversions.distance.p95) << '\n';
    }
    auto avg = [&](Percentiles& a) {
      const double k = row.completed ? static_cast<double>(row.completed)
                                     : std::numeric_limits<double>::quiet_NaN();
      a.p90 /= k;
      a.p95 /= k;
      a.p99 /= k;
      a.max /= k;
    };
    avg(row.inversion);
    avg(row.position);
    rows.push_back(row);
  }
  auto f = open_csv(cfg, "figure.csv");
  f << "m,graphs,completed,inv_p90,inv_p95,inv_p99,inv_max,pos_p90,pos_p95,pos_p99,pos_max\n";
  for (const auto& r : rows) {
    f << r.m << ',' << r.graphs << ',' << r.completed;
    for (const auto* p : {&r.inversion, &r.position})
      f << ',' << format_real(p->p90) << ',' << format_real(p->p95) << ',' << format_real(p->p99)
        << ',' << format_real(p->max);
    f << '\n';
  }
  finish(f, "figure.csv");
  return rows;
}

std::vector<DistinguishSummary> cmd_distinguish(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model != Decay::Exponential || cfg.c != 1.0)
    throw ConfigError("distinguish: requires model=exp and c=1");
  if (cfg.trials == 0) throw ConfigError("distinguish: trials must be >= 1");
  if (!(cfg.delta >= 0.0) || !(cfg.delta < cfg.n / 2.0))
    throw ConfigError("distinguish: requires 0 <= delta < n/2");
  cfg.params().validate_model();
  const auto& grid = cfg.m_grid.empty() ? kDefaultDistinguishGrid : cfg.m_grid;
  std::vector<DistinguishSummary> out;
  auto summary_file = open_csv(cfg, "summary.csv");
  write_summary_csv_header(summary_file);
  for (std::size_t m : grid) {
    DistinguishOptions options;
    options.threads = cfg.threads;
    options.fixed_x = cfg.fixed_x;
    DistinguishSummary s = run_distinguish_trials(cfg.n, m, cfg.delta, cfg.trials,
                                                  derive_seed(cfg.seed, Stream::Trials, m), options);
    write_summary_csv_row(summary_file, s);
    auto f = open_csv(cfg, "trials_m" + std::to_string(m) + ".csv");
    write_trials_csv(f, s);
    finish(f, "trials csv");
    log << "m=" << m << " error_rate " << format_real(s.error_rate) << " mean E[L] "
        << format_real(s.mean_expected_l) << " (" << s.regime << ")\n";
    out.push_back(std::move(s));
  }
  finish(summary_file, "summary.csv");
  return out;
}

namespace {

// Binds `--key` options to strings and applies them after parsing, so flags
// and config files share one conversion path and flags win.
class Binder {
public:
  explicit Binder(CLI::App* app) : app_(app) {}

  void value(const std::string& key, const std::string& help) {
    app_->add_option("--" + key, values_[key], help);
  }
  void flag(const std::string& key, const std::string& help) {
    app_->add_flag("--" + key, flags_[key], help);
  }
  void apply(RunConfig& cfg) const {
    for (const auto& [key, v] : values_)
      if (app_->count("--" + key) > 0) apply_setting(cfg, key, v);
    for (const auto& [key, v] : flags_)
      if (app_->count("--" + key) > 0) apply_setting(cfg, key, v ? "true" : "false");
  }

private:
  CLI::App* app_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> flags_;
};

void model_options(Binder& b) {
  b.value("n", "segment length");
  b.value("c", "edge constant in (0, 1]");
  b.value("model", "decay model: exp or lin");
  b.value("delta", "precision, 0 < delta < 0.1");
  b.value("threads", "worker cap (0 = all cores)");
  b.value("out", "output directory");
}

void window_options(Binder& b) {
  b.value("window-L", "override window L");
  b.value("window-U", "override window U");
  b.value("window-delta", "override window delta");
  b.value("tau-same", "linear estimator same-endpoint threshold");
}

int report(std::ostream& err, const char* kind, const std::exception& e, int code) {
  err << "latline: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Latent line graphs: generate, recover order and positions, run experiments"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "file of key=value lines; flags override it");

  struct Sub {
    CLI::App* app;
    std::unique_ptr<Binder> binder;
  };
  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Binder& {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config_file, "file of key=value lines; flags override it");
    auto& entry = subs[name] = {s, std::make_unique<Binder>(s)};
    return *entry.binder;
  };

  {
    auto& b = make("generate", "sample positions and a graph");
    model_options(b);
    b.value("m", "number of vertices");
    b.value("seed", "64-bit seed");
    b.flag("cutoff", "skip pairs with edge probability below 1e-15");
  }
  {
    auto& b = make("recover", "recover order and positions from a graph file");
    model_options(b);
    window_options(b);
    b.value("graph", "input graph file");
    b.value("truth", "true positions file for evaluation");
    b.flag("scores", "also write scores.csv");
  }
  {
    auto& b = make("estimate", "dump estimated distances up to the window's U");
    model_options(b);
    window_options(b);
    b.value("graph", "input graph file");
  }
  {
    auto& b = make("reproduce-figure", "inversion and position-error percentiles over an m grid");
    model_options(b);
    window_options(b);
    b.value("graphs", "graphs per grid point");
    b.value("m-grid", "comma-separated vertex counts");
    b.value("seed", "64-bit seed");
    b.flag("cutoff", "skip pairs with edge probability below 1e-15");
    b.flag("keep-going", "record failed graphs instead of stopping");
  }
  {
    auto& b = make("distinguish", "likelihood-ratio distinguishing trials");
    model_options(b);
    b.value("trials", "trials per grid point");
    b.value("m-grid", "comma-separated vertex counts");
    b.value("seed", "64-bit seed");
    b.flag("fixed-x", "reuse one X for all trials");
  }
  {
    auto& b = make("selftest", "run the built-in property checks");
    b.value("seed", "64-bit seed");
    b.value("threads", "worker cap (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config_file.empty()) load_config_file(cfg, config_file);
    std::string name;
    for (auto& [n, s] : subs) {
      if (s.app->parsed()) {
        name = n;
        s.binder->apply(cfg);
      }
    }
    out << "# effective config\n";
    for (const auto& line : describe(cfg, true)) out << "# " << line << '\n';

    if (name == "generate") {
      cmd_generate(cfg);
    } else if (name == "recover") {
      cmd_recover(cfg, out);
    } else if (name == "estimate") {
      cmd_estimate(cfg);
    } else if (name == "reproduce-figure") {
      cmd_reproduce_figure(cfg, out);
    } else if (name == "distinguish") {
      cmd_distinguish(cfg, out);
    } else if (name == "selftest") {
      return cmd_selftest(cfg, out) == 0 ? kExitOk : kExitAlgorithm;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    return report(err, "config error", e, kExitConfig);
  } catch (const EmptyAnchorSetError& e) {
    return report(err, "recovery failed", e, kExitAlgorithm);
  } catch (const FormatError& e) {
    return report(err, "bad input file", e, kExitIo);
  } catch (const std::ios_base::failure& e) {
    return report(err, "I/O error", e, kExitIo);
  } catch (const std::filesystem::filesystem_error& e) {
    return report(err, "I/O error", e, kExitIo);
  } catch (const std::exception& e) {
    return report(err, "error", e, kExitAlgorithm);
  }
}

}  // namespace latline::cli
