// generators.hpp - seeded test-instance generators
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybrid/graph.hpp"

namespace hybrid {

enum class GraphModel {
  ErdosRenyi,       // param = edge probability p
  RandomGeometric,  // param = radius r in the unit square
  Grid,             // rows = largest divisor of n not above sqrt(n)
  Path,
  Lollipop,         // Erdos-Renyi core on n - tail nodes, param = p, plus a path tail
  Complete,
  Star,
};

struct GraphSpec {
  GraphModel model = GraphModel::ErdosRenyi;
  std::size_t n = 0;
  double param = 0.0;
  std::size_t tail = 0;  // Lollipop only
  Weight wmin = 1;
  Weight wmax = 1;
  std::uint64_t seed = 0;
};

// Deterministic in the spec. Disconnected samples are redrawn with a derived
// seed, at most kGeneratorRetries times, then Error(Disconnected) is thrown.
inline constexpr unsigned kGeneratorRetries = 64;
WeightedGraph gen_random_graph(const GraphSpec& spec);

// Parses "er:n=100,p=0.1,wmin=1,wmax=10" style strings. The seed key is
// optional; seed_override (when set) replaces it.
GraphSpec parse_graph_spec(const std::string& text);
std::string format_graph_spec(const GraphSpec& spec);

enum class LowerBoundRole { A, B, C, SB, SC, PathNode };
const char* role_name(LowerBoundRole r);

struct LowerBoundInstance {
  WeightedGraph graph;
  std::vector<LowerBoundRole> roles;
  NodeId a = 0, b = 0, c = 0;
  std::size_t y = 0;  // |S_b| = |S_c|
  std::size_t L = 0;  // hop(a, b)
  std::size_t x = 0;  // hop(a, c)
};

// Two stars hanging off a path, ids in [0, 2y) reserved for the star leaves.
LowerBoundInstance gen_lower_bound_graph(std::size_t n, double p, std::uint64_t seed = 0);
void write_roles(std::ostream& out, const LowerBoundInstance& inst);

}  // namespace hybrid
