#include "latline_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "latline/errors.hpp"
#include "latline/io.hpp"

namespace latline::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
  return x;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(std::string(key) + ": not a non-negative integer: '" + std::string(v) + "'");
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": not a boolean: '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"n", [](RunConfig& c, auto k, auto v) { c.n = to_real(k, v); }},
      {"m", [](RunConfig& c, auto k, auto v) { c.m = to_int<std::size_t>(k, v); }},
      {"c", [](RunConfig& c, auto k, auto v) { c.c = to_real(k, v); }},
      {"model",
       [](RunConfig& c, auto k, auto v) {
         try {
           c.model = parse_decay(v);
         } catch (const std::exception&) {
           throw ConfigError(std::string(k) + ": expected exp or lin, got '" + std::string(v) + "'");
         }
       }},
      {"delta", [](RunConfig& c, auto k, auto v) { c.delta = to_real(k, v); }},
      {"seed", [](RunConfig& c, auto k, auto v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"trials", [](RunConfig& c, auto k, auto v) { c.trials = to_int<std::size_t>(k, v); }},
      {"graphs", [](RunConfig& c, auto k, auto v) { c.graphs = to_int<std::size_t>(k, v); }},
      {"threads", [](RunConfig& c, auto k, auto v) { c.threads = to_int<unsigned>(k, v); }},
      {"m-grid",
       [](RunConfig& c, auto k, auto v) {
         c.m_grid.clear();
         std::stringstream ss{std::string(v)};
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.m_grid.push_back(to_int<std::size_t>(k, item));
         }
       }},
      {"window-L", [](RunConfig& c, auto k, auto v) { c.window_L = to_real(k, v); }},
      {"window-U", [](RunConfig& c, auto k, auto v) { c.window_U = to_real(k, v); }},
      {"window-delta", [](RunConfig& c, auto k, auto v) { c.window_delta = to_real(k, v); }},
      {"cutoff", [](RunConfig& c, auto k, auto v) { c.cutoff = to_bool(k, v); }},
      {"fixed-x", [](RunConfig& c, auto k, auto v) { c.fixed_x = to_bool(k, v); }},
      {"keep-going", [](RunConfig& c, auto k, auto v) { c.keep_going = to_bool(k, v); }},
      {"scores", [](RunConfig& c, auto k, auto v) { c.scores = to_bool(k, v); }},
      {"tau-same", [](RunConfig& c, auto k, auto v) { c.tau_same = to_real(k, v); }},
      {"graph", [](RunConfig& c, auto, auto v) { c.graph = std::string(v); }},
      {"truth", [](RunConfig& c, auto, auto v) { c.truth = std::string(v); }},
      {"out", [](RunConfig& c, auto, auto v) { c.out = std::string(v); }},
  };
  return table;
}

}  // namespace

DistanceWindow RunConfig::window() const {
  DistanceWindow w = model == Decay::Exponential ? exponential_window(delta) : linear_window(delta);
  if (window_L) w.L = *window_L;
  if (window_U) w.U = *window_U;
  if (window_delta) w.delta = *window_delta;
  return w;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
}

std::vector<std::string> describe(const RunConfig& cfg, bool include_threads) {
  std::vector<std::string> lines;
  auto add = [&](const std::string& k, const std::string& v) { lines.push_back(k + "=" + v); };
  add("n", format_real(cfg.n));
  add("m", std::to_string(cfg.m));
  add("c", format_real(cfg.c));
  add("model", std::string(to_string(cfg.model)));
  add("delta", format_real(cfg.delta));
  add("seed", std::to_string(cfg.seed));
  add("trials", std::to_string(cfg.trials));
  add("graphs", std::to_string(cfg.graphs));
  if (include_threads) add("threads", std::to_string(cfg.threads));
  std::string grid;
  for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) grid += (i ? "," : "") + std::to_string(cfg.m_grid[i]);
  add("m-grid", grid);
  const DistanceWindow w = cfg.window();
  add("window-L", format_real(w.L));
  add("window-U", format_real(w.U));
  add("window-delta", format_real(w.delta));
  add("cutoff", cfg.cutoff ? "true" : "false");
  add("fixed-x", cfg.fixed_x ? "true" : "false");
  add("keep-going", cfg.keep_going ? "true" : "false");
  add("tau-same", format_real(cfg.tau_same));
  add("graph", cfg.graph);
  add("truth", cfg.truth);
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace latline::cli
