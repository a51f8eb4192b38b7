#include "hybrid/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybrid/errors.hpp"
#include "hybrid/hop_search.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/primitives.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

unsigned skeleton_hop_radius(std::size_t n, double x, double h_const) {
  if (n <= 1) return 1;
  double nn = static_cast<double>(n);
  double h = h_const * std::pow(nn, 1.0 - x) * std::log(nn);
  return std::max(1u, static_cast<unsigned>(std::ceil(h - 1e-9)));
}

double mark_probability(std::size_t n, double x) {
  return std::min(1.0, std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), x - 1.0));
}

std::vector<NodeId> sample_marks(std::size_t n, double x, std::uint64_t seed, std::optional<NodeId> force) {
  if (!(x > 0.0 && x <= 1.0)) throw Error(ErrorKind::InvalidArgument, "x must lie in (0,1]");
  const double p = mark_probability(n, x);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    NodeRng rng(derive_seed(seed, 0x3a7c, v));
    if ((force && *force == v) || bernoulli(rng, p)) out.push_back(v);
  }
  return out;
}

SkeletonGraph build_skeleton(Network& net, std::vector<NodeId> marks, double x, unsigned h) {
  const WeightedGraph& g = net.graph();
  const std::size_t n = g.n();
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  SkeletonGraph s;
  s.x = x;
  s.h = h;
  s.members = std::move(marks);
  s.index_of.assign(n, -1);
  for (std::size_t i = 0; i < s.members.size(); ++i) s.index_of[s.members[i]] = static_cast<std::int32_t>(i);
  s.views.assign(n, {});

  auto scope = net.phase("skeleton");
  const std::uint64_t salt = net.next_seed();
  std::vector<NodeRng> rngs;
  rngs.reserve(n);
  for (NodeId v = 0; v < n; ++v) rngs.push_back(net.node_rng(v, salt));

  HopBoundedSearch search(g);
  std::vector<Edge> overlay;
  std::uint64_t local_words = 0;
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    const auto& dist = search.run_single(s.members[i], h);
    for (NodeId u : search.reached()) {
      local_words += g.degree(u);
      auto& view = s.views[u];
      ++view.marks_in_reach;
      if (dist[u] < view.nearest_dist) {  // members ascend, so ties keep the smaller id
        view.nearest_dist = dist[u];
        view.nearest = static_cast<std::int32_t>(i);
      }
      // Reservoir sampling gives a uniform choice among marks in reach.
      if (uniform_below(rngs[u], view.marks_in_reach) == 0) view.helper_of = static_cast<std::int32_t>(i);
      auto j = s.index_of[u];
      if (j > static_cast<std::int32_t>(i))
        overlay.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), dist[u]});
    }
  }
  for (std::size_t i = 0; i < s.members.size(); ++i) s.views[s.members[i]].helper_of = static_cast<std::int32_t>(i);
  s.overlay = WeightedGraph(s.members.size(), std::move(overlay));
  net.local_rounds(h, local_words);
  return s;
}

void require_mark_coverage(Network& net, const SkeletonGraph& skel) {
  std::vector<Word> has(net.n());
  for (NodeId v = 0; v < net.n(); ++v) has[v] = skel.views[v].marks_in_reach > 0;
  if (aggregate_min(net, has) == 0)
    throw Error(ErrorKind::SkeletonCoverage, "some node has no skeleton node within h hops");
}

std::string SkeletonPropertyReport::to_text() const {
  std::ostringstream o;
  o << "{connected: " << connected << ", distancePreserving: " << distance_preserving
    << ", coverage: " << coverage << ", sizeOk: " << size_ok << ", witnesses: [";
  for (std::size_t i = 0; i < witnesses.size(); ++i) o << (i ? ", " : "") << '"' << witnesses[i] << '"';
  o << "]}";
  return o.str();
}

SkeletonPropertyReport verify_properties(const WeightedGraph& g, const SkeletonGraph& skel, double size_const) {
  SkeletonPropertyReport r;
  const std::size_t n = g.n(), k = skel.size();
  const std::size_t max_witnesses = 8;
  auto witness = [&](const std::string& w) {
    if (r.witnesses.size() < max_witnesses) r.witnesses.push_back(w);
  };

  r.connected = k > 0 && is_connected(skel.overlay);
  if (!r.connected) witness(k == 0 ? "empty skeleton" : "skeleton graph disconnected");

  r.distance_preserving = true;
  for (std::size_t i = 0; i < k; ++i) {
    auto ds = dijkstra(skel.overlay, static_cast<NodeId>(i));
    auto dg = dijkstra(g, skel.members[i]);
    for (std::size_t j = 0; j < k; ++j) {
      if (ds.dist[j] != dg.dist[skel.members[j]]) {
        r.distance_preserving = false;
        witness("d_S(" + std::to_string(skel.members[i]) + "," + std::to_string(skel.members[j]) + ")=" +
                weight_to_string(ds.dist[j]) + " vs d_G=" + weight_to_string(dg.dist[skel.members[j]]));
      }
    }
  }

  // best[v]: shortest trailing unmarked run over shortest u-v paths whose
  // unmarked runs all stay below h nodes; kInfinity when none exists.
  r.coverage = true;
  const Weight limit = skel.h;  // runs must be <= h-1 nodes
  std::vector<NodeId> order(n);
  std::vector<Weight> best(n), hops(n);
  for (NodeId u = 0; u < n && r.coverage; ++u) {
    auto d = dijkstra(g, u).dist;
    for (NodeId v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return d[a] < d[b]; });
    for (NodeId v : order) {
      if (d[v] == kInfinity) {
        best[v] = kInfinity;
        continue;
      }
      Weight pred = kInfinity;
      hops[v] = v == u ? 0 : kInfinity;
      if (v == u) {
        pred = 0;
      } else {
        for (const Arc& a : g.neighbors(v))
          if (d[a.to] != kInfinity && d[a.to] + a.w == d[v]) {
            pred = std::min(pred, best[a.to]);
            hops[v] = std::min(hops[v], hops[a.to] + 1);
          }
      }
      if (pred == kInfinity) {
        best[v] = kInfinity;
      } else {
        best[v] = skel.contains(v) ? 0 : pred + 1;
        if (best[v] >= limit) best[v] = kInfinity;
      }
      // Pairs closer than h hops are exempt.
      if (best[v] == kInfinity && hops[v] >= skel.h) {
        r.coverage = false;
        witness("no compliant shortest path " + std::to_string(u) + "->" + std::to_string(v));
        break;
      }
    }
  }

  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  r.size_ok = static_cast<double>(k) <= size_const * std::pow(nn, skel.x) * std::log(nn);
  if (!r.size_ok) witness("|M|=" + std::to_string(k) + " too large");
  return r;
}

DistanceTable extend_distances(Network& net, const SkeletonGraph& skel, std::span<const NodeId> sources,
                               const DistanceTable& estimates) {
  const WeightedGraph& g = net.graph();
  if (estimates.rows() != sources.size() || estimates.cols() != skel.size())
    throw Error(ErrorKind::InvalidArgument, "estimate table must be sources x skeleton");
  auto scope = net.phase("extend");
  DistanceTable out(sources.size(), g.n());
  HopBoundedSearch search(g);
  std::vector<SeedDistance> seeds;
  std::uint64_t local_words = 0;
  for (std::size_t r = 0; r < sources.size(); ++r) {
    seeds.clear();
    seeds.push_back({sources[r], 0});
    for (std::size_t i = 0; i < skel.size(); ++i)
      if (estimates.at(r, i) != kInfinity) seeds.push_back({skel.members[i], estimates.at(r, i)});
    const auto& d = search.run(seeds, skel.h);
    auto row = out.row(r);
    std::copy(d.begin(), d.end(), row.begin());
    for (NodeId u : search.reached()) local_words += g.degree(u);
  }
  net.local_rounds(skel.h, local_words);
  return out;
}

}  // namespace hybrid
