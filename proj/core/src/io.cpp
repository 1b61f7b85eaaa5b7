#include "latline/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include "latline/errors.hpp"

namespace latline {

namespace {

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("unexpected end of file reading ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string expect_key(const std::string& line, const std::string& key) {
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) throw FormatError("expected '" + prefix + "...', got '" + line + "'");
  return line.substr(prefix.size());
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed number '" + text + "'");
  }
  return value;
}

template <class Int>
Int parse_int(const std::string& text) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed integer '" + text + "'");
  }
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw FormatError("format_real: conversion failed");
  return std::string(buf, ptr);
}

void write_positions(std::ostream& out, const PositionVector& x) {
  out << kPositionsMagic << '\n';
  out << "n=" << format_real(x.n()) << '\n';
  out << "m=" << x.size() << '\n';
  // %.17g always carries >= 15 significant digits and round-trips exactly.
  char buf[40];
  for (double v : x.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

PositionVector read_positions(std::istream& in) {
  if (next_line(in, "positions magic") != kPositionsMagic) throw FormatError("not a positions file");
  const double n = parse_real(expect_key(next_line(in, "n"), "n"));
  const auto m = parse_int<std::size_t>(expect_key(next_line(in, "m"), "m"));
  std::vector<double> x;
  x.reserve(m);
  for (std::size_t i = 0; i < m; ++i) x.push_back(parse_real(next_line(in, "position")));
  try {
    return PositionVector(n, std::move(x));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

void write_graph(std::ostream& out, const GraphHeader& header, const RandomGraph& g) {
  if (g.vertex_count() != header.m) throw FormatError("write_graph: header m != graph size");
  out << kGraphMagic << '\n';
  out << "n=" << format_real(header.n) << '\n';
  out << "m=" << header.m << '\n';
  out << "model=" << to_string(header.decay) << '\n';
  out << "c=" << format_real(header.c) << '\n';
  out << "seed=" << header.seed << '\n';
  std::string buf;
  for (auto [i, j] : g.edges()) {
    buf.clear();
    buf += std::to_string(i);
    buf += ' ';
    buf += std::to_string(j);
    buf += '\n';
    out << buf;
  }
}

GraphFile read_graph(std::istream& in) {
  if (next_line(in, "graph magic") != kGraphMagic) throw FormatError("not a graph file");
  GraphFile file;
  file.header.n = parse_real(expect_key(next_line(in, "n"), "n"));
  file.header.m = parse_int<std::size_t>(expect_key(next_line(in, "m"), "m"));
  try {
    file.header.decay = parse_decay(expect_key(next_line(in, "model"), "model"));
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  file.header.c = parse_real(expect_key(next_line(in, "c"), "c"));
  file.header.seed = parse_int<std::uint64_t>(expect_key(next_line(in, "seed"), "seed"));

  std::vector<std::pair<Vertex, Vertex>> edges;
  std::string line;
  std::pair<Vertex, Vertex> prev{0, 0};
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw FormatError("malformed edge line '" + line + "'");
    const auto i = parse_int<Vertex>(line.substr(0, space));
    const auto j = parse_int<Vertex>(line.substr(space + 1));
    if (!(i < j)) throw FormatError("edge line must have i < j: '" + line + "'");
    if (!first && !(prev < std::pair{i, j})) throw FormatError("edges not strictly sorted at '" + line + "'");
    if (j >= file.header.m) throw FormatError("edge endpoint out of range: '" + line + "'");
    prev = {i, j};
    first = false;
    edges.emplace_back(i, j);
  }
  file.graph = RandomGraph(file.header.m, edges);
  return file;
}

void write_positions_file(const std::string& path, const PositionVector& x) {
  auto out = open_out(path);
  write_positions(out, x);
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

PositionVector read_positions_file(const std::string& path) {
  auto in = open_in(path);
  return read_positions(in);
}

void write_graph_file(const std::string& path, const GraphHeader& header, const RandomGraph& g) {
  auto out = open_out(path);
  write_graph(out, header, g);
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

GraphFile read_graph_file(const std::string& path) {
  auto in = open_in(path);
  return read_graph(in);
}

}  // namespace latline
