#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hybrid/errors.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/skeleton.hpp"
#include "test_util.hpp"

using namespace hybrid;

namespace {

HybridConfig cfg(std::uint64_t seed = 1) {
  HybridConfig c;
  c.seed = seed;
  return c;
}

constexpr double kTwoThirds = 2.0 / 3.0;

}  // namespace

TEST_CASE("hop radius and mark probability") {
  CHECK(skeleton_hop_radius(1000, kTwoThirds) == static_cast<unsigned>(std::ceil(2 * 10 * std::log(1000.0))));
  CHECK(skeleton_hop_radius(1, 0.5) == 1);
  CHECK(mark_probability(1000, 1.0) == doctest::Approx(1.0));
  CHECK(mark_probability(1000, kTwoThirds) == doctest::Approx(0.1));
}

TEST_CASE("sample marks: full density, forced node, bad exponent") {
  CHECK(sample_marks(50, 1.0, 3).size() == 50);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto m = sample_marks(200, 0.2, s, NodeId{77});
    CHECK(std::binary_search(m.begin(), m.end(), NodeId{77}));
  }
  CHECK_THROWS_AS(sample_marks(10, 0.0, 1), Error);
  CHECK_THROWS_AS(sample_marks(10, 1.5, 1), Error);
}

TEST_CASE("sample marks: size concentrates around n^x") {
  const std::size_t n = 1000;
  double sum = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto sz = static_cast<double>(sample_marks(n, kTwoThirds, s).size());
    sum += sz;
    CHECK(sz >= 0.5 * 100);
    CHECK(sz <= 2 * 100 * std::log(1000.0));
  }
  // Mean of 100 Binomial(1000, 0.1) draws has standard deviation sqrt(90)/10.
  double mean = sum / 100;
  CHECK(std::abs(mean - 100.0) <= 3 * std::sqrt(90.0) / 10);
}

TEST_CASE("build: path with both endpoints marked") {
  auto g = testutil::path_graph(10);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0, 9}, 0.5, 20);
  REQUIRE(s.overlay.m() == 1);
  CHECK(s.overlay.edges()[0] == Edge{0, 1, 9});
  CHECK(net.ledger().phase("skeleton").rounds == 20);
  CHECK(s.views[4].marks_in_reach == 2);
  CHECK(s.views[4].nearest == 0);
  CHECK(s.views[5].nearest == 1);
}

TEST_CASE("build: empty mark set") {
  auto g = testutil::path_graph(5);
  Network net(g, cfg());
  auto s = build_skeleton(net, {}, 0.5, 3);
  CHECK(s.size() == 0);
  CHECK(s.overlay.m() == 0);
  CHECK_FALSE(verify_properties(g, s).connected);
  CHECK_THROWS_AS(require_mark_coverage(net, s), Error);
}

TEST_CASE("build: edges equal centralized hop-limited distances") {
  auto g = testutil::er(300, 0.05, 11);
  Network net(g, cfg(11));
  unsigned h = skeleton_hop_radius(300, kTwoThirds);
  auto s = build_skeleton(net, sample_marks(300, kTwoThirds, 11), kTwoThirds, h);
  REQUIRE(s.size() > 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto d = hop_limited_distances(g, s.members[i], h);
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      Weight w = s.overlay.edge_weight(i, j).value_or(kInfinity);
      CHECK(w == d.dist[s.members[j]]);
    }
  }
}

TEST_CASE("build: small hop radius drops far pairs") {
  auto g = testutil::path_graph(10);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0, 4, 9}, 0.5, 4);
  CHECK(s.overlay.m() == 1);
  CHECK(s.overlay.has_edge(0, 1));
  CHECK(s.views[9].helper_of == 2);
  CHECK(s.views[7].marks_in_reach == 2);
  CHECK(s.views[2].marks_in_reach == 2);
}

TEST_CASE("verify: small path holds everything") {
  auto g = testutil::path_graph(5);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0, 4}, 0.5, 10);
  auto r = verify_properties(g, s);
  CHECK(r.all());
  CHECK(r.to_text().find("connected: 1") != std::string::npos);
}

TEST_CASE("verify: coverage fails when a long unmarked run is forced") {
  auto g = testutil::path_graph(12);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0, 11}, 0.5, 3);
  auto r = verify_properties(g, s);
  CHECK_FALSE(r.coverage);
  CHECK_FALSE(r.connected);
  CHECK_FALSE(r.witnesses.empty());
}

TEST_CASE("verify: coverage accepts one compliant path among several") {
  // Layers {0} {1,2} {3,4} {5,6} {7}, complete between neighbors. Only node 3
  // is marked inside, so 0-2-4-6-7 has a bad run but 0-2-3-6-7 does not.
  std::vector<Edge> e{{0, 1, 1}, {0, 2, 1}, {7, 5, 1}, {7, 6, 1}};
  for (NodeId a : {1, 2})
    for (NodeId b : {3, 4}) e.push_back({a, b, 1});
  for (NodeId a : {3, 4})
    for (NodeId b : {5, 6}) e.push_back({a, b, 1});
  WeightedGraph g(8, e);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0, 3, 7}, 0.5, 3);
  CHECK(verify_properties(g, s).coverage);
  auto without = build_skeleton(net, {0, 7}, 0.5, 3);
  CHECK_FALSE(verify_properties(g, without).coverage);
}

TEST_CASE("verify: 50 random graphs at x=2/3") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t n = 150 + 5 * seed;
    auto g = testutil::er(n, 5.0 / n, 1000 + seed);
    Network net(g, cfg(seed));
    auto s = build_skeleton(net, sample_marks(n, kTwoThirds, seed), kTwoThirds, skeleton_hop_radius(n, kTwoThirds));
    auto r = verify_properties(g, s);
    if (r.all()) ++good;
    else MESSAGE("seed " << seed << ": " << r.to_text());
  }
  CHECK(good >= 49);
}

TEST_CASE("extend: exact estimates reproduce Dijkstra") {
  auto g = testutil::er(200, 0.06, 9);
  Network net(g, cfg(9));
  unsigned h = skeleton_hop_radius(200, kTwoThirds);
  auto s = build_skeleton(net, sample_marks(200, kTwoThirds, 9), kTwoThirds, h);
  NodeId src = 0;
  auto truth = dijkstra(g, src).dist;
  DistanceTable est(1, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) est.at(0, i) = truth[s.members[i]];
  std::vector<NodeId> sources{src};
  auto out = extend_distances(net, s, sources, est);
  for (NodeId v = 0; v < g.n(); ++v) CHECK(out.at(0, v) == truth[v]);
  CHECK(net.ledger().phase("extend").rounds == h);
}

TEST_CASE("extend: member source sees zero, inflated inputs stay in envelope") {
  auto g = testutil::er(200, 0.06, 21);
  Network net(g, cfg(21));
  unsigned h = skeleton_hop_radius(200, kTwoThirds);
  auto s = build_skeleton(net, sample_marks(200, kTwoThirds, 21), kTwoThirds, h);
  REQUIRE(s.size() > 0);
  NodeId src = s.members[0];
  auto truth = dijkstra(g, src).dist;
  DistanceTable est(1, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) est.at(0, i) = 3 * truth[s.members[i]];
  std::vector<NodeId> sources{src};
  auto out = extend_distances(net, s, sources, est);
  CHECK(out.at(0, src) == 0);
  for (NodeId v = 0; v < g.n(); ++v) {
    CHECK(out.at(0, v) >= truth[v]);
    CHECK(out.at(0, v) <= 3 * truth[v]);
  }
}

TEST_CASE("extend: exact on nearly every seed and never below the truth") {
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t n = 120 + 3 * seed;
    auto g = testutil::er(n, 6.0 / n, 500 + seed);
    Network net(g, cfg(seed));
    auto s = build_skeleton(net, sample_marks(n, kTwoThirds, seed), kTwoThirds, skeleton_hop_radius(n, kTwoThirds));
    NodeId src = static_cast<NodeId>(seed % n);
    auto truth = dijkstra(g, src).dist;
    DistanceTable est(1, s.size());
    for (std::size_t i = 0; i < s.size(); ++i) est.at(0, i) = truth[s.members[i]];
    std::vector<NodeId> sources{src};
    auto out = extend_distances(net, s, sources, est);
    bool ok = true;
    for (NodeId v = 0; v < n; ++v) {
      REQUIRE(out.at(0, v) >= truth[v]);
      ok = ok && out.at(0, v) == truth[v];
    }
    exact += ok;
  }
  CHECK(exact >= 49);
}

TEST_CASE("extend: shape mismatch") {
  auto g = testutil::path_graph(4);
  Network net(g, cfg());
  auto s = build_skeleton(net, {0}, 0.5, 4);
  std::vector<NodeId> sources{0, 1};
  CHECK_THROWS_AS(extend_distances(net, s, sources, DistanceTable(1, 1)), Error);
}
