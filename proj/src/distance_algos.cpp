#include "hybrid/distance_algos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>

#include "hybrid/errors.hpp"
#include "hybrid/hop_search.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

template <class F>
auto with_retries(AlgoContext& ctx, F&& f) -> decltype(f()) {
  for (unsigned attempt = 0;; ++attempt) {
    try {
      return f();
    } catch (const Error& e) {
      if (!e.retryable() || attempt >= ctx.params.max_retries) throw;
      ++ctx.retries;
    }
  }
}

SkeletonGraph make_skeleton(AlgoContext& ctx, std::vector<NodeId> marks, double x) {
  const unsigned h = skeleton_hop_radius(ctx.net.n(), x, ctx.params.h_const);
  SkeletonGraph skel = build_skeleton(ctx.net, std::move(marks), x, h);
  require_mark_coverage(ctx.net, skel);
  ctx.skeleton_size = skel.size();
  ctx.hop_radius = h;
  return skel;
}

std::vector<std::vector<Word>> packed_incident_edges(const WeightedGraph& g) {
  std::vector<std::vector<Word>> out(g.n());
  for (NodeId v = 0; v < g.n(); ++v)
    for (const Arc& a : g.neighbors(v)) out[v].push_back(pack_id_value(a.to, a.w));
  return out;
}

// Multi-source Dijkstra without hop limits; dense graphs use the O(k^2) scan.
class SeededDijkstra {
 public:
  explicit SeededDijkstra(const WeightedGraph& g) : g_(&g), k_(g.n()) {
    dense_ = k_ > 0 && 8 * g.m() >= k_ * k_;
    if (dense_) {
      mat_.assign(k_ * k_, kInfinity);
      for (const Edge& e : g.edges()) mat_[e.u * k_ + e.v] = mat_[e.v * k_ + e.u] = e.w;
    }
  }

  const std::vector<Weight>& run(std::span<const SeedDistance> seeds) {
    dist_.assign(k_, kInfinity);
    for (const auto& s : seeds) dist_[s.node] = std::min(dist_[s.node], s.offset);
    dense_ ? run_dense() : run_sparse();
    return dist_;
  }

 private:
  void run_dense() {
    done_.assign(k_, 0);
    for (std::size_t it = 0; it < k_; ++it) {
      std::size_t u = k_;
      for (std::size_t v = 0; v < k_; ++v)
        if (!done_[v] && dist_[v] != kInfinity && (u == k_ || dist_[v] < dist_[u])) u = v;
      if (u == k_) break;
      done_[u] = 1;
      const Weight* row = mat_.data() + u * k_;
      for (std::size_t v = 0; v < k_; ++v) {
        Weight nd = add_weights(dist_[u], row[v]);
        if (nd < dist_[v]) dist_[v] = nd;
      }
    }
  }
  void run_sparse() {
    using Item = std::pair<Weight, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (NodeId v = 0; v < k_; ++v)
      if (dist_[v] != kInfinity) pq.push({dist_[v], v});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d != dist_[u]) continue;
      for (const Arc& a : g_->neighbors(u)) {
        Weight nd = add_weights(d, a.w);
        if (nd < dist_[a.to]) {
          dist_[a.to] = nd;
          pq.push({nd, a.to});
        }
      }
    }
  }

  const WeightedGraph* g_;
  std::size_t k_;
  bool dense_ = false;
  std::vector<Weight> mat_, dist_;
  std::vector<char> done_;
};

// Truncated BFS: largest hop distance reached within `radius`.
class BoundedBfs {
 public:
  explicit BoundedBfs(const WeightedGraph& g) : g_(&g), seen_(g.n(), 0) {}

  // Visits nodes within `radius` hops of s in BFS order; returns them.
  const std::vector<std::pair<NodeId, Weight>>& run(NodeId s, Weight radius) {
    ++epoch_;
    out_.clear();
    out_.push_back({s, 0});
    seen_[s] = epoch_;
    for (std::size_t i = 0; i < out_.size(); ++i) {
      auto [u, d] = out_[i];
      if (d == radius) continue;
      for (const Arc& a : g_->neighbors(u))
        if (seen_[a.to] != epoch_) {
          seen_[a.to] = epoch_;
          out_.push_back({a.to, d + 1});
        }
    }
    return out_;
  }

 private:
  const WeightedGraph* g_;
  std::vector<std::uint64_t> seen_;
  std::uint64_t epoch_ = 0;
  std::vector<std::pair<NodeId, Weight>> out_;
};

std::vector<NodeId> normalize_sources(const Network& net, std::vector<NodeId> sources) {
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  for (NodeId s : sources)
    if (s >= net.n()) throw Error(ErrorKind::InvalidArgument, "source id out of range");
  return sources;
}

}  // namespace

// ---- backends --------------------------------------------------------------

OracleDelivery AbstractOracleBackend::round(const OracleRoundSpec& spec) {
  ++cost.oracle_rounds;
  return oracle_model_round(*g_, spec);
}

OracleDelivery SimulatedOracleBackend::round(const OracleRoundSpec& spec) {
  ++cost.oracle_rounds;
  return sim_->run(spec);
}

TieredDelivery AbstractCliqueBackend::tiered_round(const TieredRoundSpec& spec) {
  ++cost.tiered_rounds;
  return tiered_model_round(*g_, spec);
}

std::vector<CliqueWord> AbstractCliqueBackend::clique_round(std::span<const CliqueWord> words) {
  ++cost.clique_rounds;
  std::vector<std::uint64_t> keys;
  for (const auto& w : words) {
    if (w.from >= g_->n() || w.to >= g_->n() || w.from == w.to)
      throw Error(ErrorKind::InvalidArgument, "clique words need distinct endpoints");
    keys.push_back(std::uint64_t{w.from} * g_->n() + w.to);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
    throw Error(ErrorKind::PayloadTooLarge, "more than one word for an ordered pair");
  return {words.begin(), words.end()};
}

TieredDelivery SimulatedCliqueBackend::tiered_round(const TieredRoundSpec& spec) {
  ++cost.tiered_rounds;
  try {
    TieredDelivery d = tiered_->run(spec);
    extra_tiered_attempts += tiered_->last_attempts() - 1;
    return d;
  } catch (const Error&) {
    extra_tiered_attempts += tiered_->last_attempts() - 1;
    throw;
  }
}

std::vector<CliqueWord> SimulatedCliqueBackend::clique_round(std::span<const CliqueWord> words) {
  ++cost.clique_rounds;
  return router_->round(words);
}

// ---- model-level algorithms ------------------------------------------------

DistanceVector oracle_sssp(OracleBackend& backend, NodeId s) {
  const WeightedGraph& g = backend.graph();
  const std::size_t n = g.n();
  if (s >= n) throw Error(ErrorKind::InvalidArgument, "source out of range");

  OracleDelivery up = backend.round({OracleDirection::ToOracle, packed_incident_edges(g)});
  std::vector<Edge> known;
  for (NodeId v = 0; v < n; ++v)
    for (Word w : up.words[v]) {
      NodeId u = unpack_id(w);
      if (v < u) known.push_back({v, u, unpack_value(w)});
    }
  const auto dist = dijkstra(WeightedGraph(n, std::move(known)), s).dist;

  OracleRoundSpec down{OracleDirection::FromOracle, std::vector<std::vector<Word>>(n)};
  for (NodeId v = 0; v < n; ++v)
    if (g.degree(v) > 0) down.outbox[v] = {Word{dist[v]}};
  OracleDelivery got = backend.round(down);

  DistanceVector out{s, std::vector<Weight>(n, kInfinity), std::nullopt};
  for (NodeId v = 0; v < n; ++v)
    if (!got.words[v].empty()) out.dist[v] = got.words[v][0];
  out.dist[s] = 0;
  return out;
}

unsigned degree_tier(std::size_t deg) { return static_cast<unsigned>(std::bit_width(deg)) - 1; }

DistanceTable tiered_apsp(CliqueBackend& backend, const TierObserver& observer) {
  const WeightedGraph& g = backend.graph();
  const std::size_t k = g.n();
  DistanceTable known(k, k);
  for (std::size_t v = 0; v < k; ++v) known.at(v, v) = 0;
  if (k == 0) return known;

  TieredRoundSpec spec{packed_incident_edges(g)};
  const TieredDelivery delivery = backend.tiered_round(spec);

  constexpr int kNoTier = -1;
  std::vector<int> tier(k, kNoTier);
  for (NodeId v = 0; v < k; ++v)
    if (g.degree(v) > 0) tier[v] = static_cast<int>(degree_tier(g.degree(v)));
  const int top = static_cast<int>(std::bit_width(k - 1));  // ceil(log2 k)

  std::vector<SeedDistance> seeds;
  std::vector<CliqueWord> words;
  for (int i = top - 1; i >= 0; --i) {
    // Nodes of tier i know every edge touching T_{<=i}.
    std::vector<Edge> sub;
    for (const Edge& e : g.edges())
      if ((tier[e.u] != kNoTier && tier[e.u] <= i) || (tier[e.v] != kNoTier && tier[e.v] <= i)) sub.push_back(e);
    WeightedGraph g_le(k, std::move(sub));
    SeededDijkstra dj(g_le);

    words.clear();
    for (NodeId v = 0; v < k; ++v) {
      if (tier[v] != i) continue;
      const auto& heard = delivery.received_from[v];
      for (NodeId u = 0; u < k; ++u)
        if (tier[u] != kNoTier && tier[u] <= i && !std::binary_search(heard.begin(), heard.end(), u))
          throw Error(ErrorKind::RoundBudgetExceeded, "tiered delivery misses an eligible sender");
      seeds.assign(1, {v, 0});
      for (NodeId w = 0; w < k; ++w)
        if (tier[w] > i && known.at(v, w) != kInfinity) seeds.push_back({w, known.at(v, w)});
      const auto& d = dj.run(seeds);
      for (NodeId u = 0; u < k; ++u) {
        if (tier[u] == kNoTier || tier[u] > i) continue;
        known.at(v, u) = d[u];
        if (u != v) words.push_back({v, u, d[u]});
      }
    }
    for (const CliqueWord& w : backend.clique_round(words)) known.at(w.to, w.from) = w.word;
    if (observer) observer(static_cast<unsigned>(i), known);
  }
  return known;
}

// ---- Hybrid algorithms -----------------------------------------------------

DistanceVector hybrid_exact_sssp(AlgoContext& ctx, NodeId s) {
  Network& net = ctx.net;
  if (s >= net.n()) throw Error(ErrorKind::InvalidArgument, "source out of range");
  return with_retries(ctx, [&] {
    SkeletonGraph skel = make_skeleton(ctx, sample_marks(net.n(), kTwoThirds, net.next_seed(), s), kTwoThirds);
    CliqueRouter router(net, skel);
    OracleSimulator sim(net, skel, router);
    SimulatedOracleBackend backend(skel, sim);
    DistanceVector on_skel = oracle_sssp(backend, static_cast<NodeId>(skel.index_of[s]));
    DistanceTable est(1, skel.size());
    std::copy(on_skel.dist.begin(), on_skel.dist.end(), est.row(0).begin());
    const NodeId src[] = {s};
    DistanceTable full = extend_distances(net, skel, src, est);
    auto row = full.row(0);
    return DistanceVector{s, std::vector<Weight>(row.begin(), row.end()), std::nullopt};
  });
}

DistanceTable skeleton_apsp(AlgoContext& ctx, const SkeletonGraph& skel, CliqueRouter& router) {
  TieredSimulator tiered(ctx.net, skel, router, {ctx.params.sampler_const, 3});
  SimulatedCliqueBackend backend(skel, router, tiered);
  try {
    DistanceTable t = tiered_apsp(backend);
    ctx.tiered_retries += backend.extra_tiered_attempts;
    return t;
  } catch (const Error&) {
    ctx.tiered_retries += backend.extra_tiered_attempts;
    throw;
  }
}

DistanceTable skeleton_apsp(AlgoContext& ctx, const SkeletonGraph& skel) {
  CliqueRouter router(ctx.net, skel);
  return skeleton_apsp(ctx, skel, router);
}

SampledSkeletonApsp sampled_skeleton_apsp(AlgoContext& ctx, double x) {
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorKind::InvalidArgument, "x must lie in (0,1)");
  return with_retries(ctx, [&] {
    SampledSkeletonApsp r;
    r.skel = make_skeleton(ctx, sample_marks(ctx.net.n(), x, ctx.net.next_seed()), x);
    r.apsp = skeleton_apsp(ctx, r.skel);
    return r;
  });
}

double densify_probability(std::size_t n, double x) {
  if (x >= kTwoThirds - 1e-12) return 0.0;
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  const double p = std::pow(nn, x - 1.0), target = std::pow(nn, -1.0 / 3.0);
  return (target - p) / (1.0 - p);
}

std::vector<NodeId> densify_marks(std::size_t n, double x, const std::vector<NodeId>& marks, std::uint64_t seed) {
  const double q = densify_probability(n, x);
  std::vector<char> in(n, 0);
  for (NodeId v : marks) in[v] = 1;
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    NodeRng rng(derive_seed(seed, 0x5d3e, v));
    if (in[v] || bernoulli(rng, q)) out.push_back(v);
  }
  return out;
}

RsspResult rssp(AlgoContext& ctx, double x) {
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorKind::InvalidArgument, "x must lie in (0,1)");
  Network& net = ctx.net;
  const std::size_t n = net.n();
  return with_retries(ctx, [&] {
    RsspResult r;
    r.sources = sample_marks(n, x, net.next_seed());
    const bool densify = x < kTwoThirds - 1e-12;
    auto marks = densify ? densify_marks(n, x, r.sources, net.next_seed()) : r.sources;
    r.skel = make_skeleton(ctx, std::move(marks), std::max(x, kTwoThirds));
    r.router = std::make_unique<CliqueRouter>(net, r.skel);
    r.skel_apsp = skeleton_apsp(ctx, r.skel, *r.router);
    DistanceTable est(r.sources.size(), r.skel.size());
    for (std::size_t i = 0; i < r.sources.size(); ++i) {
      auto src = r.skel_apsp.row(static_cast<std::size_t>(r.skel.index_of[r.sources[i]]));
      std::copy(src.begin(), src.end(), est.row(i).begin());
    }
    r.dist = extend_distances(net, r.skel, r.sources, est);
    return r;
  });
}

ReassignResult reassign_skeletons(AlgoContext& ctx, const SkeletonGraph& skel, const std::vector<bool>& in_a,
                                  double k) {
  Network& net = ctx.net;
  const WeightedGraph& g = net.graph();
  const std::size_t n = g.n();
  if (in_a.size() != n) throw Error(ErrorKind::InvalidArgument, "one membership flag per node");
  ReassignResult res;
  res.helpers.assign(n, {});
  std::vector<Word> flags(n);
  for (NodeId v = 0; v < n; ++v) flags[v] = in_a[v];
  res.size_a = aggregate_sum(net, flags);
  if (res.size_a == 0) return res;

  auto scope = net.phase("reassign");
  const double p = std::min(1.0, k / static_cast<double>(res.size_a));
  const std::uint64_t salt = net.next_seed();
  std::uint64_t learned = 0, informed = 0;
  for (std::uint32_t i = 0; i < skel.size(); ++i) {
    NodeRng rng = net.node_rng(skel.members[i], salt);
    std::uint32_t load = 0;
    for (NodeId u : hop_ball(g, skel.members[i], skel.h)) {
      ++learned;
      if (in_a[u] && bernoulli(rng, p)) {
        res.helpers[u].push_back(i);
        ++load;
      }
    }
    informed += load;
    res.max_load = std::max(res.max_load, load);
  }
  net.local_rounds(skel.h, learned);
  net.local_rounds(skel.h, informed);

  std::vector<Word> ok(n, 1);
  for (NodeId u = 0; u < n; ++u)
    if (in_a[u] && res.helpers[u].empty()) ok[u] = 0;
  if (aggregate_min(net, ok) == 0) throw Error(ErrorKind::AssignmentDeficit, "a node of A got no skeleton helper");
  return res;
}

MssResult exact_n13_ssp(AlgoContext& ctx, std::vector<NodeId> sources_in) {
  Network& net = ctx.net;
  const WeightedGraph& g = net.graph();
  const std::size_t n = g.n();
  const std::vector<NodeId> sources = normalize_sources(net, std::move(sources_in));
  return with_retries(ctx, [&] {
    MssResult res;
    res.sources = sources;
    const std::size_t q = sources.size();

    // U becomes globally known.
    std::vector<std::vector<Token>> u_tokens(n);
    for (NodeId s : sources) u_tokens[s].push_back({s, s});
    token_dissemination(net, u_tokens, ctx.params.td);

    RsspResult r = rssp(ctx, kTwoThirds);
    const SkeletonGraph& skel = r.skel;
    const std::size_t k = skel.size();
    const unsigned h = skel.h;
    // r.sources equals skel.members at x = 2/3, so r.dist rows are skeleton indices.

    // Every source learns its h-hop neighborhood.
    {
      auto scope = net.phase("explore");
      net.local_rounds(h, 2 * g.m());
    }
    HopBoundedSearch search(g);
    DistanceTable dh(q, n);
    for (std::size_t j = 0; j < q; ++j) {
      const auto& d = search.run_single(sources[j], h);
      std::copy(d.begin(), d.end(), dh.row(j).begin());
    }
    const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
    const double threshold = ctx.params.theta * std::cbrt(nn) * std::log(nn);
    std::vector<bool> dense(q);
    for (std::size_t j = 0; j < q; ++j) {
      dense[j] = skel.views[sources[j]].marks_in_reach > threshold;
      (dense[j] ? res.dense_sources : res.sparse_sources)++;
    }

    DistanceTable est(q, k);
    // Sparse sources publish their distances to nearby skeleton nodes.
    std::vector<std::vector<Token>> tokens(n);
    for (std::size_t j = 0; j < q; ++j) {
      if (dense[j]) continue;
      for (std::uint32_t i = 0; i < k; ++i)
        if (dh.at(j, skel.members[i]) != kInfinity)
          tokens[sources[j]].push_back({sources[j], pack_id_value(i, r.dist.at(i, sources[j]))});
    }
    if (res.sparse_sources > 0) {
      TdResult td = token_dissemination(net, tokens, ctx.params.td);
      for (const Token& t : td.tokens) {
        const auto j = static_cast<std::size_t>(std::lower_bound(sources.begin(), sources.end(), t.owner) - sources.begin());
        const std::uint32_t v = unpack_id(t.body);
        const Weight dvs = unpack_value(t.body);
        for (std::uint32_t u = 0; u < k; ++u)
          est.at(j, u) = std::min(est.at(j, u), add_weights(r.skel_apsp.at(u, v), dvs));
      }
      for (std::size_t j = 0; j < q; ++j)
        if (!dense[j])
          for (std::uint32_t u = 0; u < k; ++u) est.at(j, u) = std::min(est.at(j, u), dh.at(j, skel.members[u]));
    }

    // Dense sources hand their distance rows to assigned skeleton helpers,
    // which forward them in clique rounds.
    if (res.dense_sources > 0) {
      std::vector<bool> in_a(n, false);
      for (std::size_t j = 0; j < q; ++j)
        if (dense[j]) in_a[sources[j]] = true;
      ReassignResult ra = reassign_skeletons(ctx, skel, in_a, ctx.params.reassign_k);
      std::vector<CliqueWord> words;
      std::uint64_t handed = 0;
      for (std::size_t j = 0; j < q; ++j) {
        if (!dense[j]) continue;
        const auto& helpers = ra.helpers[sources[j]];
        handed += helpers.size() * k;
        for (std::uint32_t v = 0; v < k; ++v) {
          const std::uint32_t helper = helpers[v % helpers.size()];
          const Word w = pack_id_value(static_cast<NodeId>(j), r.dist.at(v, sources[j]));
          if (helper == v) {
            est.at(j, v) = std::min(est.at(j, v), unpack_value(w));
          } else {
            words.push_back({helper, v, w});
          }
        }
      }
      {
        auto scope = net.phase("proxy");
        net.local_rounds(h, handed);
      }
      for (const CliqueWord& w : r.router->batch(words))
        est.at(unpack_id(w.word), w.to) = std::min(est.at(unpack_id(w.word), w.to), unpack_value(w.word));
    }

    // Sources inside the skeleton already have exact rows.
    for (std::size_t j = 0; j < q; ++j) {
      auto idx = skel.index_of[sources[j]];
      if (idx < 0) continue;
      for (std::uint32_t u = 0; u < k; ++u) est.at(j, u) = std::min(est.at(j, u), r.skel_apsp.at(u, idx));
    }
    res.dist = extend_distances(net, skel, sources, est);
    return res;
  });
}

MssResult approx_mssp(AlgoContext& ctx, std::vector<NodeId> sources_in, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  Network& net = ctx.net;
  const WeightedGraph& g = net.graph();
  const std::size_t n = g.n();
  const std::vector<NodeId> sources = normalize_sources(net, std::move(sources_in));
  const double eta = g.unweighted() ? 2.0 / epsilon : 1.0;
  return with_retries(ctx, [&] {
    MssResult res;
    res.sources = sources;
    const std::size_t q = sources.size();
    SkeletonGraph skel = make_skeleton(ctx, sample_marks(n, kTwoThirds, net.next_seed()), kTwoThirds);
    DistanceTable apsp = skeleton_apsp(ctx, skel);

    std::vector<Word> has_rep(n, 1);
    for (NodeId s : sources) has_rep[s] = skel.views[s].nearest >= 0;
    if (aggregate_min(net, has_rep) == 0)
      throw Error(ErrorKind::RepresentativeMissing, "a source has no skeleton node within h hops");

    std::vector<std::vector<Token>> tokens(n);
    for (NodeId s : sources)
      tokens[s].push_back({s, pack_id_value(static_cast<NodeId>(skel.views[s].nearest), skel.views[s].nearest_dist)});
    token_dissemination(net, tokens, ctx.params.td);

    const auto radius = static_cast<unsigned>(std::ceil(eta * skel.h - 1e-9));
    {
      auto scope = net.phase("explore");
      net.local_rounds(radius, 2 * g.m());
    }
    DistanceTable est(q, skel.size());
    for (std::size_t j = 0; j < q; ++j) {
      const auto& view = skel.views[sources[j]];
      for (std::size_t v = 0; v < skel.size(); ++v)
        est.at(j, v) = add_weights(apsp.at(v, static_cast<std::size_t>(view.nearest)), view.nearest_dist);
    }
    res.dist = extend_distances(net, skel, sources, est);
    HopBoundedSearch search(g);
    for (std::size_t j = 0; j < q; ++j) {
      const auto& d = search.run_single(sources[j], radius);
      for (NodeId u = 0; u < n; ++u) res.dist.at(j, u) = std::min(res.dist.at(j, u), d[u]);
    }
    return res;
  });
}

std::vector<double> ecc_unweighted(AlgoContext& ctx, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  const WeightedGraph& g = ctx.net.graph();
  if (!g.unweighted()) throw Error(ErrorKind::InvalidArgument, "unweighted eccentricities need unit weights");
  const std::size_t n = g.n();
  RsspResult r = rssp(ctx, kTwoThirds);
  const double reach = (1.0 + 1.0 / epsilon) * r.skel.h;
  const auto radius = static_cast<Weight>(std::min<double>(std::ceil(reach - 1e-9), static_cast<double>(n)));
  {
    auto scope = ctx.net.phase("explore");
    ctx.net.local_rounds(radius, 2 * g.m());
  }
  std::vector<double> out(n, 0.0);
  BoundedBfs bfs(g);
  for (NodeId u = 0; u < n; ++u) {
    Weight best = 0;
    for (std::size_t i = 0; i < r.sources.size(); ++i) best = std::max(best, r.dist.at(i, u));
    for (const auto& [v, d] : bfs.run(u, radius)) best = std::max(best, d);
    out[u] = static_cast<double>(best);
  }
  return out;
}

std::vector<double> ecc_weighted(AlgoContext& ctx) {
  Network& net = ctx.net;
  const WeightedGraph& g = net.graph();
  const std::size_t n = g.n();
  RsspResult r = rssp(ctx, kTwoThirds);
  const SkeletonGraph& skel = r.skel;
  const std::size_t k = skel.size();

  // ecc_h(v): farthest exact distance among nodes within h hops of v. Each
  // such node already knows its distance to v, so a convergecast suffices.
  std::vector<Weight> ecc_h(k, 0);
  BoundedBfs bfs(g);
  std::uint64_t words = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& ball = bfs.run(skel.members[i], skel.h);
    for (const auto& [w, hops] : ball) ecc_h[i] = std::max(ecc_h[i], r.dist.at(i, w));
    words += ball.size();
  }
  {
    auto scope = net.phase("explore");
    net.local_rounds(skel.h, words);
  }
  std::vector<std::vector<Token>> tokens(n);
  for (std::uint32_t i = 0; i < k; ++i) tokens[skel.members[i]].push_back({skel.members[i], pack_id_value(i, ecc_h[i])});
  TdResult td = token_dissemination(net, tokens, ctx.params.td);

  std::vector<double> out(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    Weight best = 0;
    for (const Token& t : td.tokens) {
      const std::uint32_t i = unpack_id(t.body);
      best = std::max(best, add_weights(r.dist.at(i, u), unpack_value(t.body)));
    }
    out[u] = static_cast<double>(best) / 3.0;
  }
  return out;
}

double diameter_unweighted(AlgoContext& ctx, double epsilon) {
  auto ecc = ecc_unweighted(ctx, epsilon);
  std::vector<Word> vals(ecc.size());
  for (std::size_t v = 0; v < ecc.size(); ++v) vals[v] = static_cast<Word>(ecc[v]);
  return static_cast<double>(aggregate_max(ctx.net, vals));
}

Weight diameter_weighted(AlgoContext& ctx) {
  DistanceVector d = hybrid_exact_sssp(ctx, 0);
  return aggregate_max(ctx.net, d.dist);
}

}  // namespace hybrid
