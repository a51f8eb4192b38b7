// hop_search.hpp - hop-bounded multi-source shortest paths
//
// Evaluates min over seeds of offset + d^h(seed, v) with a label-setting
// search over (distance, hops) pairs. A label survives only if it uses fewer
// hops than every label already settled at its node, so each node keeps a
// Pareto front. This is the fixed point that h rounds of local distance-vector
// flooding reach, and it is how the simulator evaluates such phases.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hybrid/graph.hpp"

namespace hybrid {

struct SeedDistance {
  NodeId node = 0;
  Weight offset = 0;
};

class HopBoundedSearch {
 public:
  explicit HopBoundedSearch(const WeightedGraph& g);

  // Returned reference stays valid until the next run().
  const std::vector<Weight>& run(std::span<const SeedDistance> seeds, unsigned h);
  const std::vector<Weight>& run_single(NodeId s, unsigned h) {
    SeedDistance seed{s, 0};
    return run({&seed, 1}, h);
  }

  // Nodes with a finite result after the last run, in settle order.
  const std::vector<NodeId>& reached() const { return reached_; }
  // Hop count of the lightest (then fewest-hop) label at v; valid for reached nodes.
  unsigned hops_of_best(NodeId v) const { return first_hops_[v]; }

 private:
  struct Label {
    Weight d;
    std::uint32_t hops;
    NodeId v;
    bool operator>(const Label& o) const {
      return d != o.d ? d > o.d : hops > o.hops;
    }
  };

  void reset();
  void push(Label l);
  Label pop();
  bool run_unbounded(std::span<const SeedDistance> seeds, unsigned h);

  const WeightedGraph* g_;
  std::vector<Weight> dist_;
  std::vector<std::uint32_t> best_hops_;
  std::vector<std::uint32_t> first_hops_;
  std::vector<NodeId> reached_;
  std::vector<NodeId> touched_;
  std::vector<Label> heap_;
};

// Nodes within h hops of v (including v), sorted.
std::vector<NodeId> hop_ball(const WeightedGraph& g, NodeId v, unsigned h);

}  // namespace hybrid
