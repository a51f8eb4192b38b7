// oracles.hpp - centralized reference computations used for verification
#pragma once

#include <vector>

#include "hybrid/graph.hpp"

namespace hybrid {

DistanceVector dijkstra(const WeightedGraph& g, NodeId s);

// Full Bellman-Ford; independent cross-check for dijkstra.
DistanceVector bellman_ford(const WeightedGraph& g, NodeId s);

// d^h(s, .) by h synchronous relaxation rounds.
DistanceVector hop_limited_distances(const WeightedGraph& g, NodeId s, unsigned h);

// Unweighted hop distances; unreachable nodes get kInfinity.
std::vector<Weight> hop_distances(const WeightedGraph& g, NodeId s);

bool is_connected(const WeightedGraph& g);

// Throws Error(Disconnected) on disconnected input.
std::vector<Weight> brute_eccentricities(const WeightedGraph& g);

// rows = sources, one dijkstra each.
DistanceTable brute_apsp(const WeightedGraph& g);

}  // namespace hybrid
