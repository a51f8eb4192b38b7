#include "hybrid/oracles.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "hybrid/errors.hpp"

namespace hybrid {

DistanceVector dijkstra(const WeightedGraph& g, NodeId s) {
  DistanceVector out{s, std::vector<Weight>(g.n(), kInfinity), std::nullopt};
  using Item = std::pair<Weight, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  out.dist[s] = 0;
  pq.push({0, s});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != out.dist[u]) continue;
    for (const Arc& a : g.neighbors(u)) {
      Weight nd = d + a.w;
      if (nd < out.dist[a.to]) {
        out.dist[a.to] = nd;
        pq.push({nd, a.to});
      }
    }
  }
  return out;
}

DistanceVector bellman_ford(const WeightedGraph& g, NodeId s) {
  unsigned rounds = g.n() > 1 ? static_cast<unsigned>(g.n() - 1) : 1;
  auto dv = hop_limited_distances(g, s, rounds);
  dv.hop_limit.reset();
  return dv;
}

DistanceVector hop_limited_distances(const WeightedGraph& g, NodeId s, unsigned h) {
  std::vector<Weight> cur(g.n(), kInfinity);
  cur[s] = 0;
  std::vector<Weight> next = cur;
  for (unsigned r = 0; r < h; ++r) {
    bool changed = false;
    for (const Edge& e : g.edges()) {
      if (cur[e.u] != kInfinity && cur[e.u] + e.w < next[e.v]) {
        next[e.v] = cur[e.u] + e.w;
        changed = true;
      }
      if (cur[e.v] != kInfinity && cur[e.v] + e.w < next[e.u]) {
        next[e.u] = cur[e.v] + e.w;
        changed = true;
      }
    }
    cur = next;
    if (!changed) break;
  }
  return {s, std::move(cur), h};
}

std::vector<Weight> hop_distances(const WeightedGraph& g, NodeId s) {
  std::vector<Weight> d(g.n(), kInfinity);
  std::vector<NodeId> frontier{s};
  d[s] = 0;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    NodeId u = frontier[i];
    for (const Arc& a : g.neighbors(u)) {
      if (d[a.to] == kInfinity) {
        d[a.to] = d[u] + 1;
        frontier.push_back(a.to);
      }
    }
  }
  return d;
}

bool is_connected(const WeightedGraph& g) {
  if (g.n() <= 1) return true;
  auto d = hop_distances(g, 0);
  return std::find(d.begin(), d.end(), kInfinity) == d.end();
}

std::vector<Weight> brute_eccentricities(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorKind::Disconnected, "eccentricities need a connected graph");
  std::vector<Weight> ecc(g.n(), 0);
  for (NodeId v = 0; v < g.n(); ++v) {
    auto d = dijkstra(g, v);
    ecc[v] = *std::max_element(d.dist.begin(), d.dist.end());
  }
  return ecc;
}

DistanceTable brute_apsp(const WeightedGraph& g) {
  DistanceTable t(g.n(), g.n());
  for (NodeId s = 0; s < g.n(); ++s) {
    auto d = dijkstra(g, s);
    std::copy(d.dist.begin(), d.dist.end(), t.row(s).begin());
  }
  return t;
}

}  // namespace hybrid
