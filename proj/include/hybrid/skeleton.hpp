// skeleton.hpp - sampled skeleton graphs and distance extension
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybrid/engine.hpp"
#include "hybrid/graph.hpp"

namespace hybrid {

// h = ceil(h_const * n^(1-x) * ln n), at least 1.
unsigned skeleton_hop_radius(std::size_t n, double x, double h_const = 2.0);
double mark_probability(std::size_t n, double x);

// Each node joins independently with probability n^(x-1), drawn from its own
// stream. x is in (0, 1]; force, when given, always joins.
std::vector<NodeId> sample_marks(std::size_t n, double x, std::uint64_t seed,
                                 std::optional<NodeId> force = std::nullopt);

// What a real node knows about the skeleton after the h-round flooding.
struct NodeSkeletonView {
  std::uint32_t marks_in_reach = 0;  // |M within h hops|
  std::int32_t nearest = -1;         // skeleton index minimizing (d^h, id)
  Weight nearest_dist = kInfinity;
  std::int32_t helper_of = -1;  // skeleton index this node helps; uniform over marks in reach
};

struct SkeletonGraph {
  double x = 0.0;
  unsigned h = 0;
  std::vector<NodeId> members;       // sorted real ids
  std::vector<std::int32_t> index_of;  // real id -> skeleton index, -1 if unmarked
  WeightedGraph overlay;             // on skeleton indices, weight d^h
  std::vector<NodeSkeletonView> views;

  std::size_t size() const { return members.size(); }
  bool contains(NodeId v) const { return index_of[v] >= 0; }
};

// Every mark floods (mark, running distance) for h rounds with per-mark
// minimum retention; each node keeps the records that reach it. Charged as h
// local rounds under "skeleton".
SkeletonGraph build_skeleton(Network& net, std::vector<NodeId> marks, double x, unsigned h);

// Throws SkeletonCoverage (retryable) unless every node has a mark within h
// hops; decided by a min-aggregate.
void require_mark_coverage(Network& net, const SkeletonGraph& skel);

struct SkeletonPropertyReport {
  bool connected = false;            // skeleton graph connected
  bool distance_preserving = false;  // d_S = d_G on all member pairs
  bool coverage = false;             // some shortest path has no unmarked run of h nodes
  bool size_ok = false;              // |M| <= size_const * n^x * ln n
  std::vector<std::string> witnesses;

  bool all() const { return connected && distance_preserving && coverage && size_ok; }
  std::string to_text() const;
};

// Centralized check. The coverage part runs a dynamic program over each
// shortest-path DAG tracking the shortest possible trailing unmarked run.
SkeletonPropertyReport verify_properties(const WeightedGraph& g, const SkeletonGraph& skel,
                                         double size_const = 2.0);

// estimates: rows = sources, cols = skeleton indices. Returns rows = sources,
// cols = all nodes, with min{d^h(u,s), min_v d^h(u,v) + est(v,s)}. h local
// rounds under "extend".
DistanceTable extend_distances(Network& net, const SkeletonGraph& skel, std::span<const NodeId> sources,
                               const DistanceTable& estimates);

}  // namespace hybrid
