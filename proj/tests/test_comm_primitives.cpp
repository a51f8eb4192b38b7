#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "hybrid/clique_router.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/primitives.hpp"
#include "hybrid/rng.hpp"
#include "hybrid/skeleton.hpp"
#include "test_util.hpp"

using namespace hybrid;

namespace {

HybridConfig cfg(std::uint64_t seed = 1, double gamma_const = 4) {
  HybridConfig c;
  c.seed = seed;
  c.gamma_const = gamma_const;
  return c;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace

TEST_CASE("aggregate: sum of ones and max of ids") {
  auto g = testutil::er(64, 0.1, 3);
  Network net(g, cfg());
  std::vector<Word> ones(64, 1), ids(64);
  std::iota(ids.begin(), ids.end(), 0);
  AggregateResult r = aggregate_and_broadcast(net, {ones, combine_sum, 0});
  for (Word w : r.per_node) CHECK(w == 64);
  CHECK(r.rounds <= 4 * std::log2(64.0));
  CHECK(aggregate_max(net, ids) == 63);
  CHECK(net.ledger().phase("agg").drops == 0);
}

TEST_CASE("aggregate: random sums match direct summation") {
  auto g = testutil::er(200, 0.05, 5);
  Network net(g, cfg(5));
  Rng rng(5);
  std::vector<Word> vals(200);
  for (auto& v : vals) v = rng() % 1000000;
  CHECK(aggregate_sum(net, vals) == std::accumulate(vals.begin(), vals.end(), Word{0}));
}

TEST_CASE("aggregate: identical at every node over 50 graph seeds") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    std::size_t n = 20 + s * 7;
    auto g = testutil::er(n, 6.0 / n, 100 + s);
    Network net(g, cfg(s));
    Rng rng(s);
    std::vector<Word> vals(n);
    for (auto& v : vals) v = rng() % 1000;
    auto r = aggregate_and_broadcast(net, {vals, combine_min, ~Word{0}});
    Word expect = *std::min_element(vals.begin(), vals.end());
    for (Word w : r.per_node) REQUIRE(w == expect);
  }
}

TEST_CASE("aggregate: single node and too-small gamma") {
  WeightedGraph one(1, {});
  Network net(one, cfg());
  std::vector<Word> v{7};
  CHECK(aggregate_sum(net, v) == 7);
  HybridConfig c = cfg();
  c.gamma_override = 1;
  auto g = testutil::path_graph(4);
  Network tight(g, c);
  std::vector<Word> z(4, 0);
  CHECK_THROWS_AS(aggregate_sum(tight, z), Error);
}

TEST_CASE("token dissemination: one token") {
  auto g = testutil::er(128, 0.04, 2);
  Network net(g, cfg(2));
  std::vector<std::vector<Token>> init(128);
  init[17].push_back({17, 99});
  auto r = token_dissemination(net, init);
  CHECK(r.k == 1);
  CHECK(r.ell == 1);
  for (auto c : r.known_count) CHECK(c == 1);
  CHECK(net.ledger().phase("td").rounds <= 3 * (r.budget));
  CHECK(r.budget <= 3 * (1 + 2) + 7);
}

TEST_CASE("token dissemination: one token per node, no loss or duplication") {
  auto g = testutil::er(256, 0.03, 4);
  Network net(g, cfg(4));
  std::vector<std::vector<Token>> init(256);
  for (NodeId v = 0; v < 256; ++v) init[v].push_back({v, Word{v} * 31 + 7});
  auto r = token_dissemination(net, init);
  REQUIRE(r.tokens.size() == 256);
  for (NodeId v = 0; v < 256; ++v) CHECK(r.tokens[v] == Token{v, Word{v} * 31 + 7});
  for (auto c : r.known_count) CHECK(c == 256);
  CHECK(net.ledger().phase("td").drops == 0);
}

TEST_CASE("token dissemination: duplicates and empty input") {
  auto g = testutil::path_graph(6);
  Network net(g, cfg());
  std::vector<std::vector<Token>> init(6);
  CHECK(token_dissemination(net, init).k == 0);
  init[0].push_back({0, 1});
  init[3].push_back({0, 1});
  CHECK_THROWS_AS(token_dissemination(net, init), Error);
}

TEST_CASE("token dissemination: rounds grow like sqrt(k)") {
  // A long path keeps local spreading slow, so the global term dominates.
  const std::size_t n = 1024;
  auto g = testutil::path_graph(n);
  std::vector<double> xs, ys;
  for (std::size_t k : {64, 256, 1024}) {
    std::vector<double> rounds;
    for (std::uint64_t s = 0; s < 10; ++s) {
      Network net(g, cfg(s, 1));
      std::vector<std::vector<Token>> init(n);
      Rng rng(s);
      std::vector<NodeId> holders(n);
      std::iota(holders.begin(), holders.end(), 0);
      portable_shuffle(holders.begin(), holders.end(), rng);
      for (std::size_t t = 0; t < k; ++t) init[holders[t]].push_back({holders[t], t});
      token_dissemination(net, init);
      rounds.push_back(static_cast<double>(net.ledger().phase("td").rounds));
    }
    std::sort(rounds.begin(), rounds.end());
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(rounds[rounds.size() / 2]));
  }
  double m = slope(xs, ys);
  MESSAGE("td k-slope " << m);
  CHECK(m >= 0.3);
  CHECK(m <= 0.7);
}

TEST_CASE("word packing round trip") {
  Word w = pack_id_value(123456, 987654321);
  CHECK(unpack_id(w) == 123456);
  CHECK(unpack_value(w) == 987654321);
  CHECK(unpack_value(pack_id_value(5, kInfinity)) == kInfinity);
  CHECK_THROWS_AS(pack_id_value(1u << 24, 0), Error);
}

TEST_CASE("local simulation: neighbor ids, two-hop knowledge, empty payloads") {
  auto g = testutil::er(300, 0.05, 11);
  Network net(g, cfg(11));
  auto marks = sample_marks(g.n(), 2.0 / 3.0, 11);
  unsigned h = skeleton_hop_radius(g.n(), 2.0 / 3.0);
  auto skel = build_skeleton(net, marks, 2.0 / 3.0, h);
  const std::size_t k = skel.size();

  std::vector<std::vector<Word>> ids(k);
  for (std::size_t i = 0; i < k; ++i) ids[i] = {i};
  auto before = net.ledger().phase("local-sim").rounds;
  auto got = local_sim_round(net, skel, ids);
  CHECK(net.ledger().phase("local-sim").rounds - before == h);
  for (std::size_t i = 0; i < k; ++i) {
    std::set<Word> seen, expect;
    for (const auto& d : got[i]) seen.insert(d.payload[0]);
    for (const Arc& a : skel.overlay.neighbors(i)) expect.insert(a.to);
    CHECK(seen == expect);
  }

  // Incident edges give each node its two-hop skeleton neighborhood.
  std::vector<std::vector<Word>> inc(k);
  for (std::size_t i = 0; i < k; ++i)
    for (const Arc& a : skel.overlay.neighbors(i)) inc[i].push_back(a.to);
  got = local_sim_round(net, skel, inc);
  for (std::size_t i = 0; i < k; ++i) {
    std::set<Word> two, expect;
    for (const auto& d : got[i]) two.insert(d.payload.begin(), d.payload.end());
    for (const Arc& a : skel.overlay.neighbors(i))
      for (const Arc& b : skel.overlay.neighbors(a.to)) expect.insert(b.to);
    CHECK(two == expect);
  }

  before = net.ledger().phase("local-sim").rounds;
  got = local_sim_round(net, skel, std::vector<std::vector<Word>>(k));
  CHECK(net.ledger().phase("local-sim").rounds - before == h);
  for (const auto& v : got) CHECK(v.empty());
}

TEST_CASE("clique round: two skeleton nodes") {
  auto g = testutil::path_graph(10);
  Network net(g, cfg());
  auto skel = build_skeleton(net, {0, 9}, 0.5, 20);
  CliqueRouter router(net, skel);
  std::vector<CliqueWord> w{{0, 1, 42}, {1, 0, 43}};
  auto out = router.round(w);
  REQUIRE(out.size() == 2);
  CHECK(out[0].word == 42);
  CHECK(out[1].word == 43);
  std::vector<CliqueWord> twice{{0, 1, 1}, {0, 1, 2}};
  CHECK_THROWS_AS(router.round(twice), Error);
  CHECK(router.batch(twice).size() == 2);
}

TEST_CASE("clique round: all-to-all ids at n=500, x=2/3, no drops") {
  auto g = testutil::er(500, 0.02, 8);
  Network net(g, cfg(8));
  const double x = 2.0 / 3.0;
  auto skel = build_skeleton(net, sample_marks(500, x, 8), x, skeleton_hop_radius(500, x));
  CliqueRouter router(net, skel);
  const auto k = static_cast<std::uint32_t>(skel.size());
  std::vector<CliqueWord> words;
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j)
      if (i != j) words.push_back({i, j, skel.members[i]});
  auto out = router.round(words);
  REQUIRE(out.size() == words.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    CHECK(out[t].word == skel.members[out[t].from]);
  }
  CHECK(router.drops() == 0);
  CHECK(net.ledger().phase("cc-sim").drops == 0);

  // The hand-over window is the farthest helper in hops, never more than h.
  unsigned farthest = 0;
  for (NodeId u = 0; u < 500; ++u) {
    auto i = skel.views[u].helper_of;
    REQUIRE(i >= 0);
    farthest = std::max<unsigned>(farthest, static_cast<unsigned>(hop_distances(g, skel.members[i])[u]));
  }
  CHECK(router.window() == farthest);
  CHECK(router.window() <= skel.h);
  CHECK(router.window() >= 1);
  CHECK(net.ledger().max_send_load() <= net.gamma());
  CHECK(net.ledger().max_recv_load() <= net.gamma());

  std::vector<std::uint16_t> mult(std::size_t{k} * k, 0);
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j)
      if (i != j) mult[i * k + j] = 1 + (i + j) % 3;
  CHECK(router.route_counts(mult) == 0);
}
