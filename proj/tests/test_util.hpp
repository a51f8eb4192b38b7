#pragma once

#include <vector>

#include "hybrid/generators.hpp"
#include "hybrid/graph.hpp"

namespace testutil {

inline hybrid::WeightedGraph path_graph(std::size_t n, hybrid::Weight w = 1) {
  std::vector<hybrid::Edge> e;
  for (hybrid::NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, w});
  return hybrid::WeightedGraph(n, e);
}

inline hybrid::WeightedGraph star_graph(std::size_t leaves) {
  std::vector<hybrid::Edge> e;
  for (hybrid::NodeId i = 1; i <= leaves; ++i) e.push_back({0, i, 1});
  return hybrid::WeightedGraph(leaves + 1, e);
}

inline hybrid::WeightedGraph triangle_1_1_5() {
  return hybrid::WeightedGraph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 5}});
}

inline hybrid::WeightedGraph er(std::size_t n, double p, std::uint64_t seed, hybrid::Weight wmin = 1,
                                hybrid::Weight wmax = 10) {
  hybrid::GraphSpec s;
  s.model = hybrid::GraphModel::ErdosRenyi;
  s.n = n;
  s.param = p;
  s.wmin = wmin;
  s.wmax = wmax;
  s.seed = seed;
  return hybrid::gen_random_graph(s);
}

}  // namespace testutil
