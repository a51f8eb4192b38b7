#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hybrid/distance_algos.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/oracles.hpp"
#include "test_util.hpp"

using namespace hybrid;

namespace {

HybridConfig cfg(std::uint64_t seed) {
  HybridConfig c;
  c.seed = seed;
  return c;
}

constexpr double kTwoThirds = 2.0 / 3.0;

WeightedGraph unweighted_er(std::size_t n, double p, std::uint64_t seed) { return testutil::er(n, p, seed, 1, 1); }

WeightedGraph lollipop(std::size_t n, std::size_t tail, double p, std::uint64_t seed) {
  GraphSpec s;
  s.model = GraphModel::Lollipop;
  s.n = n;
  s.tail = tail;
  s.param = p;
  s.wmin = 1;
  s.wmax = 10;
  s.seed = seed;
  return gen_random_graph(s);
}

bool within(double lo, double v, double hi) { return lo - 1e-9 <= v && v <= hi + 1e-9; }

}  // namespace

TEST_CASE("oracle SSSP in the abstract model") {
  auto p4 = testutil::path_graph(4);
  AbstractOracleBackend b(p4);
  auto d = oracle_sssp(b, 0);
  CHECK(d.dist == std::vector<Weight>{0, 1, 2, 3});
  CHECK(b.cost.oracle_rounds == 2);

  auto g = testutil::er(300, 0.05, 13);
  AbstractOracleBackend b2(g);
  CHECK(oracle_sssp(b2, 5).dist == dijkstra(g, 5).dist);

  WeightedGraph split(5, {{0, 1, 2}, {3, 4, 1}});
  AbstractOracleBackend b3(split);
  auto ds = oracle_sssp(b3, 0);
  CHECK(ds.dist == std::vector<Weight>{0, 2, kInfinity, kInfinity, kInfinity});
}

TEST_CASE("tiered APSP in the abstract model") {
  auto tri = testutil::triangle_1_1_5();
  AbstractCliqueBackend bt(tri);
  CHECK(tiered_apsp(bt).at(0, 2) == 2);

  auto g = testutil::er(200, 0.08, 17);
  AbstractCliqueBackend b(g);
  auto t = tiered_apsp(b);
  auto truth = brute_apsp(g);
  for (NodeId v = 0; v < 200; ++v)
    for (NodeId u = 0; u < 200; ++u) REQUIRE(t.at(v, u) == truth.at(v, u));
  CHECK(b.cost.tiered_rounds == 1);
  CHECK(b.cost.clique_rounds <= 2 * static_cast<std::uint64_t>(std::ceil(std::log2(200.0))));

  CHECK(degree_tier(1) == 0);
  CHECK(degree_tier(3) == 1);
  CHECK(degree_tier(4) == 2);
}

TEST_CASE("tiered APSP: star center finishes in the first iteration") {
  auto star = testutil::star_graph(6);
  auto truth = brute_apsp(star);
  AbstractCliqueBackend b(star);
  bool first = true;
  tiered_apsp(b, [&](unsigned tier, const DistanceTable& known) {
    if (!first) return;
    first = false;
    CHECK(tier == 2);
    for (NodeId u = 0; u < 7; ++u) CHECK(known.at(0, u) == truth.at(0, u));
  });
  CHECK_FALSE(first);
}

TEST_CASE("tiered APSP: distances to higher tiers are final after each iteration") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto g = testutil::er(150, 0.05 + 0.02 * static_cast<double>(seed), seed);
    auto truth = brute_apsp(g);
    AbstractCliqueBackend b(g);
    unsigned violations = 0;
    tiered_apsp(b, [&](unsigned tier, const DistanceTable& known) {
      for (NodeId u = 0; u < g.n(); ++u) {
        if (degree_tier(g.degree(u)) < tier) continue;
        for (NodeId v = 0; v < g.n(); ++v) violations += known.at(v, u) != truth.at(v, u);
      }
    });
    CHECK(violations == 0);
  }
}

TEST_CASE("hybrid exact SSSP") {
  auto g = testutil::er(512, 0.05, 21);
  Network net(g, cfg(21));
  AlgoContext ctx{net};
  auto d = hybrid_exact_sssp(ctx, 7);
  CHECK(d.dist == dijkstra(g, 7).dist);
  CHECK(net.ledger().grand_total().drops == 0);
  CHECK(ctx.retries <= 2);

  WeightedGraph one(1, {});
  Network net1(one, cfg(1));
  AlgoContext ctx1{net1};
  CHECK(hybrid_exact_sssp(ctx1, 0).dist == std::vector<Weight>{0});
}

TEST_CASE("skeleton APSP matches the graph distances") {
  auto g = testutil::er(729, 0.04, 3);
  Network net(g, cfg(3));
  AlgoContext ctx{net};
  auto skel = build_skeleton(net, sample_marks(729, kTwoThirds, 3), kTwoThirds, skeleton_hop_radius(729, kTwoThirds));
  auto t = skeleton_apsp(ctx, skel);
  REQUIRE(t.rows() == skel.size());
  for (std::size_t i = 0; i < skel.size(); ++i) {
    auto truth = dijkstra(g, skel.members[i]).dist;
    for (std::size_t j = 0; j < skel.size(); ++j) REQUIRE(t.at(i, j) == truth[skel.members[j]]);
  }
  CHECK(net.ledger().grand_total().drops == 0);

  auto p = testutil::path_graph(8);
  Network net2(p, cfg(1));
  AlgoContext ctx2{net2};
  auto one = build_skeleton(net2, {3}, 0.5, 8);
  auto t1 = skeleton_apsp(ctx2, one);
  CHECK(t1.rows() == 1);
  CHECK(t1.at(0, 0) == 0);
}

TEST_CASE("random-source shortest paths") {
  auto g = testutil::er(512, 0.05, 5);
  Network net(g, cfg(5));
  AlgoContext ctx{net};
  auto r = rssp(ctx, kTwoThirds);
  REQUIRE(!r.sources.empty());
  for (std::size_t i = 0; i < r.sources.size(); ++i) {
    REQUIRE(r.dist.row(i).size() == 512);
    auto truth = dijkstra(g, r.sources[i]).dist;
    CHECK(std::equal(truth.begin(), truth.end(), r.dist.row(i).begin()));
    CHECK(r.dist.at(i, r.sources[i]) == 0);
  }

  for (double x : {1.0 / 3.0, 0.5}) {
    auto g2 = testutil::er(729, 0.03, 8);
    Network net2(g2, cfg(8));
    AlgoContext ctx2{net2};
    auto r2 = rssp(ctx2, x);
    CHECK(r2.skel.size() >= r2.sources.size());
    for (std::size_t i = 0; i < r2.sources.size(); ++i) {
      auto truth = dijkstra(g2, r2.sources[i]).dist;
      CHECK(std::equal(truth.begin(), truth.end(), r2.dist.row(i).begin()));
    }
  }

  Network net3(g, cfg(5));
  AlgoContext ctx3{net3};
  CHECK_THROWS_AS(rssp(ctx3, 1.0), Error);
}

TEST_CASE("densification lifts the mark rate to n^(-1/3)") {
  const std::size_t n = 1000;
  const double x = 1.0 / 3.0;
  CHECK(densify_probability(n, kTwoThirds) == 0.0);
  const double q = densify_probability(n, x);
  const double p = std::pow(1000.0, x - 1.0);
  CHECK(p + (1 - p) * q == doctest::Approx(0.1));

  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto marks = sample_marks(n, x, derive_seed(seed, 1));
    auto dense = densify_marks(n, x, marks, derive_seed(seed, 2));
    CHECK(std::includes(dense.begin(), dense.end(), marks.begin(), marks.end()));
    total += dense.size();
  }
  const double trials = 100.0 * n, mean = trials * 0.1, sigma = std::sqrt(trials * 0.1 * 0.9);
  CHECK(std::abs(static_cast<double>(total) - mean) <= 3 * sigma);
}

TEST_CASE("reassign skeletons") {
  const std::size_t n = 1000;
  const double cap = 3 * std::log(1000.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = testutil::er(n, 0.01, 100 + seed);
    Network net(g, cfg(seed));
    AlgoContext ctx{net};
    auto skel = build_skeleton(net, sample_marks(n, kTwoThirds, seed), kTwoThirds, skeleton_hop_radius(n, kTwoThirds));
    std::vector<bool> in_a(n, false);
    for (NodeId v = 0; v < 10; ++v) in_a[v * 97] = true;
    auto r = reassign_skeletons(ctx, skel, in_a, 1.0);
    CHECK(r.size_a == 10);
    for (NodeId v = 0; v < n; ++v) CHECK(r.helpers[v].empty() == !in_a[v]);
    CHECK(r.max_load <= cap);
  }

  auto g = testutil::er(300, 0.05, 4);
  Network net(g, cfg(4));
  AlgoContext ctx{net};
  auto skel = build_skeleton(net, sample_marks(300, kTwoThirds, 4), kTwoThirds, skeleton_hop_radius(300, kTwoThirds));
  std::vector<bool> single(300, false);
  single[17] = true;
  auto r = reassign_skeletons(ctx, skel, single, 1.0);
  CHECK(!r.helpers[17].empty());
  CHECK(r.max_load == 1);
  CHECK(net.ledger().phase("reassign").rounds == 2 * skel.h);
}

TEST_CASE("exact n^(1/3) sources: single source and mixed branches") {
  auto g = testutil::er(300, 0.04, 9);
  Network net(g, cfg(9));
  AlgoContext ctx{net};
  auto r = exact_n13_ssp(ctx, {11});
  auto truth = dijkstra(g, 11).dist;
  CHECK(std::equal(truth.begin(), truth.end(), r.dist.row(0).begin()));

  // A long tail keeps its far end sparse while the core stays dense.
  const std::size_t n = 512, tail = n / 4;
  auto lp = lollipop(n, tail, 0.05, 4);
  Network net2(lp, cfg(4));
  AlgoContext ctx2{net2};
  ctx2.params.theta = 0.5;
  std::vector<NodeId> u = {0, 40, 80, 120, 200, static_cast<NodeId>(n - 1), static_cast<NodeId>(n - 10),
                           static_cast<NodeId>(n - 20)};
  auto m = exact_n13_ssp(ctx2, u);
  CHECK(m.sparse_sources >= 1);
  CHECK(m.dense_sources >= 1);
  for (std::size_t i = 0; i < m.sources.size(); ++i) {
    auto t = dijkstra(lp, m.sources[i]).dist;
    CHECK(std::equal(t.begin(), t.end(), m.dist.row(i).begin()));
  }
  CHECK(net2.ledger().grand_total().drops == 0);
}

TEST_CASE("approximate multi-source shortest paths") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto g = testutil::er(300, 0.03, seed);
    Network net(g, cfg(seed));
    AlgoContext ctx{net};
    auto r = approx_mssp(ctx, {0, 5, 77, 150, 299}, 0.5);
    for (std::size_t i = 0; i < r.sources.size(); ++i) {
      auto t = dijkstra(g, r.sources[i]).dist;
      for (NodeId v = 0; v < 300; ++v) CHECK(within(t[v], r.dist.at(i, v), 3.0 * t[v]));
    }
  }
  for (double eps : {0.25, 0.5}) {
    auto g = unweighted_er(400, 0.02, 31);
    Network net(g, cfg(31));
    AlgoContext ctx{net};
    auto r = approx_mssp(ctx, {1, 2, 3, 200}, eps);
    for (std::size_t i = 0; i < r.sources.size(); ++i) {
      auto t = dijkstra(g, r.sources[i]).dist;
      for (NodeId v = 0; v < 400; ++v) CHECK(within(t[v], r.dist.at(i, v), (1 + eps) * t[v]));
    }
  }
  auto p4 = testutil::path_graph(4);
  Network net(p4, cfg(1));
  AlgoContext ctx{net};
  CHECK_THROWS_AS(approx_mssp(ctx, {0}, 0.0), Error);
}

TEST_CASE("unweighted eccentricities") {
  auto p9 = testutil::path_graph(9);
  Network net(p9, cfg(1));
  AlgoContext ctx{net};
  auto e = ecc_unweighted(ctx, 0.5);
  auto truth = brute_eccentricities(p9);
  for (NodeId v = 0; v < 9; ++v) CHECK(e[v] == static_cast<double>(truth[v]));

  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto g = unweighted_er(400, 0.04, seed);
    Network n2(g, cfg(seed));
    AlgoContext c2{n2};
    const double eps = 0.5;
    auto est = ecc_unweighted(c2, eps);
    auto tr = brute_eccentricities(g);
    for (NodeId v = 0; v < 400; ++v) CHECK(within(tr[v] / (1 + eps), est[v], tr[v]));
  }

  auto g = unweighted_er(200, 0.03, 3);
  Network n3(g, cfg(3));
  AlgoContext c3{n3};
  auto loose = ecc_unweighted(c3, 1e9);
  auto tr = brute_eccentricities(g);
  for (NodeId v = 0; v < 200; ++v) CHECK(loose[v] <= tr[v]);

  auto weighted = testutil::er(30, 0.3, 1, 1, 9);
  Network nw(weighted, cfg(1));
  AlgoContext cw{nw};
  CHECK_THROWS_AS(ecc_unweighted(cw, 0.5), Error);
}

TEST_CASE("weighted eccentricities") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto g = testutil::er(300, 0.04, 50 + seed);
    Network net(g, cfg(seed));
    AlgoContext ctx{net};
    auto est = ecc_weighted(ctx);
    auto tr = brute_eccentricities(g);
    for (NodeId v = 0; v < 300; ++v) CHECK(within(tr[v] / 3.0, est[v], tr[v]));
  }
  WeightedGraph one(1, {});
  Network net(one, cfg(1));
  AlgoContext ctx{net};
  CHECK(ecc_weighted(ctx) == std::vector<double>{0.0});
}

TEST_CASE("diameters") {
  auto p9 = testutil::path_graph(9);
  Network a(p9, cfg(1));
  AlgoContext ca{a};
  CHECK(diameter_unweighted(ca, 0.5) == 8.0);

  std::vector<Edge> ce;
  for (NodeId u = 0; u < 12; ++u)
    for (NodeId v = u + 1; v < 12; ++v) ce.push_back({u, v, 1});
  WeightedGraph k12(12, ce);
  Network b(k12, cfg(2));
  AlgoContext cb{b};
  CHECK(diameter_unweighted(cb, 0.5) == 1.0);

  WeightedGraph star(3, {{0, 1, 1}, {0, 2, 5}});
  Network c(star, cfg(3));
  AlgoContext cc{c};
  CHECK(diameter_weighted(cc) == 5);

  auto path = testutil::path_graph(20, 3);
  Network d(path, cfg(4));
  AlgoContext cd{d};
  CHECK(diameter_weighted(cd) == 57);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto g = testutil::er(250, 0.04, 70 + seed);
    Network net(g, cfg(seed));
    AlgoContext ctx{net};
    auto ecc = brute_eccentricities(g);
    const Weight diam = *std::max_element(ecc.begin(), ecc.end());
    const Weight est = diameter_weighted(ctx);
    CHECK(2 * est >= diam);
    CHECK(est <= diam);
  }
}
