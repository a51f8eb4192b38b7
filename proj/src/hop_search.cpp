#include "hybrid/hop_search.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace hybrid {

namespace {
constexpr std::uint32_t kNoHops = std::numeric_limits<std::uint32_t>::max();
}

HopBoundedSearch::HopBoundedSearch(const WeightedGraph& g)
    : g_(&g),
      dist_(g.n(), kInfinity),
      best_hops_(g.n(), kNoHops),
      first_hops_(g.n(), kNoHops) {}

void HopBoundedSearch::reset() {
  for (NodeId v : touched_) {
    dist_[v] = kInfinity;
    best_hops_[v] = kNoHops;
    first_hops_[v] = kNoHops;
  }
  touched_.clear();
  reached_.clear();
  heap_.clear();
}

void HopBoundedSearch::push(Label l) {
  heap_.push_back(l);
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
}

HopBoundedSearch::Label HopBoundedSearch::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
  Label l = heap_.back();
  heap_.pop_back();
  return l;
}

// Plain Dijkstra ordered by (distance, hops). When every lightest path it
// settles fits in h hops, the distances already equal d^h. Gives up otherwise.
bool HopBoundedSearch::run_unbounded(std::span<const SeedDistance> seeds, unsigned h) {
  auto offer = [&](Weight d, std::uint32_t hops, NodeId v) {
    if (d > dist_[v] || (d == dist_[v] && hops >= first_hops_[v])) return;
    if (dist_[v] == kInfinity) touched_.push_back(v);
    dist_[v] = d;
    first_hops_[v] = hops;
    push({d, hops, v});
  };
  for (const auto& s : seeds)
    if (s.offset != kInfinity) offer(s.offset, 0, s.node);
  while (!heap_.empty()) {
    Label l = pop();
    if (l.d != dist_[l.v] || l.hops != first_hops_[l.v]) continue;
    if (l.hops > h) return false;
    reached_.push_back(l.v);
    for (const Arc& a : g_->neighbors(l.v)) offer(l.d + a.w, l.hops + 1, a.to);
  }
  return true;
}

const std::vector<Weight>& HopBoundedSearch::run(std::span<const SeedDistance> seeds,
                                                 unsigned h) {
  reset();
  if (run_unbounded(seeds, h)) return dist_;
  reset();

  // Pareto labels: a node is revisited whenever a heavier label uses fewer hops.
  for (const auto& s : seeds) {
    if (s.offset == kInfinity) continue;
    push({s.offset, 0, s.node});
  }
  while (!heap_.empty()) {
    Label l = pop();
    if (l.hops >= best_hops_[l.v]) continue;
    if (best_hops_[l.v] == kNoHops) {
      touched_.push_back(l.v);
      reached_.push_back(l.v);
      dist_[l.v] = l.d;
      first_hops_[l.v] = l.hops;
    }
    best_hops_[l.v] = l.hops;
    if (l.hops >= h) continue;
    for (const Arc& a : g_->neighbors(l.v)) {
      if (l.hops + 1 < best_hops_[a.to]) push({l.d + a.w, l.hops + 1, a.to});
    }
  }
  return dist_;
}

std::vector<NodeId> hop_ball(const WeightedGraph& g, NodeId v, unsigned h) {
  std::vector<std::uint32_t> depth(g.n(), kNoHops);
  std::vector<NodeId> out{v};
  depth[v] = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    NodeId u = out[i];
    if (depth[u] >= h) continue;
    for (const Arc& a : g.neighbors(u)) {
      if (depth[a.to] == kNoHops) {
        depth[a.to] = depth[u] + 1;
        out.push_back(a.to);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hybrid
