#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "latline/model.hpp"

namespace latline {

inline constexpr const char* kPositionsMagic = "latent-line-positions v1";
inline constexpr const char* kGraphMagic = "latent-line-graph v1";

/// Header block of a graph file.
struct GraphHeader {
  double n = 0.0;
  std::size_t m = 0;
  Decay decay = Decay::Exponential;
  double c = 1.0;
  std::uint64_t seed = 0;
};

/// Shortest decimal that round-trips the double exactly.
std::string format_real(double value);

void write_positions(std::ostream& out, const PositionVector& x);
PositionVector read_positions(std::istream& in);

void write_graph(std::ostream& out, const GraphHeader& header, const RandomGraph& g);

struct GraphFile {
  GraphHeader header;
  RandomGraph graph;
};
GraphFile read_graph(std::istream& in);

void write_positions_file(const std::string& path, const PositionVector& x);
PositionVector read_positions_file(const std::string& path);
void write_graph_file(const std::string& path, const GraphHeader& header, const RandomGraph& g);
GraphFile read_graph_file(const std::string& path);

}  // namespace latline
