#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "hybrid/engine.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/hop_search.hpp"
#include "hybrid/local_view.hpp"
#include "hybrid/oracles.hpp"
#include "test_util.hpp"

using namespace hybrid;

namespace {

// Sends one word to every listed target each round for `rounds` rounds.
class Chatter : public NodeProgram {
 public:
  Chatter(std::vector<NodeId> targets, Channel ch, unsigned rounds)
      : targets_(std::move(targets)), ch_(ch), rounds_(rounds) {}
  StepResult step(const StepContext& ctx, std::span<const Envelope> inbox) override {
    received += inbox.size();
    StepResult r;
    if (ctx.round >= rounds_) {
      r.halt = true;
      return r;
    }
    for (NodeId t : targets_) r.sends.push_back({ctx.self, t, ch_, {ctx.round}});
    return r;
  }
  std::size_t received = 0;

 private:
  std::vector<NodeId> targets_;
  Channel ch_;
  unsigned rounds_;
};

// Flood from node 0; records the round in which the node first heard.
class Flood : public NodeProgram {
 public:
  StepResult step(const StepContext& ctx, std::span<const Envelope> inbox) override {
    StepResult r;
    bool fresh = (ctx.self == 0 && ctx.round == 0) || (!inbox.empty() && informed_at < 0);
    if (fresh) {
      informed_at = static_cast<long>(ctx.round);
      for (const Arc& a : ctx.graph->neighbors(ctx.self)) r.sends.push_back({ctx.self, a.to, Channel::Local, {1}});
      r.halt = true;
    }
    return r;
  }
  long informed_at = -1;
};

template <class P, class... A>
ProgramList make_programs(std::size_t n, A&&... args) {
  ProgramList p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(std::make_unique<P>(args...));
  return p;
}

}  // namespace

TEST_CASE("gamma formula") {
  HybridConfig cfg;
  CHECK(cfg.gamma_for(1024) == 40);
  CHECK(cfg.gamma_for(1000) == 40);
  cfg.gamma_const = 1;
  CHECK(cfg.gamma_for(512) == 9);
  cfg.gamma_override = 0;
  CHECK(cfg.gamma_for(512) == 0);
}

TEST_CASE("two nodes chatting locally for five rounds") {
  WeightedGraph g(2, {{0, 1, 1}});
  ProgramList p;
  p.push_back(std::make_unique<Chatter>(std::vector<NodeId>{1}, Channel::Local, 5));
  p.push_back(std::make_unique<Chatter>(std::vector<NodeId>{0}, Channel::Local, 5));
  auto run = run_hybrid(g, p, HybridConfig{}, 100);
  auto t = run.ledger.grand_total();
  CHECK(t.local_msgs == 10);
  CHECK(t.drops == 0);
  CHECK(static_cast<Chatter&>(*p[0]).received == 5);
  CHECK(static_cast<Chatter&>(*p[1]).received == 5);
}

TEST_CASE("global receive capacity on a star") {
  HybridConfig cfg;
  cfg.gamma_override = 3;
  const unsigned gamma = 3;
  auto g = testutil::star_graph(2 * gamma + 1);
  ProgramList p;
  p.push_back(std::make_unique<Chatter>(std::vector<NodeId>{}, Channel::Global, 1));
  for (unsigned i = 0; i < 2 * gamma + 1; ++i)
    p.push_back(std::make_unique<Chatter>(std::vector<NodeId>{0}, Channel::Global, 1));
  auto run = run_hybrid(g, p, cfg, 10);
  CHECK(static_cast<Chatter&>(*p[0]).received == gamma);
  CHECK(run.ledger.grand_total().drops == gamma + 1);
  CHECK(run.ledger.max_recv_load() == gamma);
}

TEST_CASE("global send capacity and adversary policies") {
  auto g = testutil::star_graph(6);
  for (Adversary adv : {Adversary::DropNewest, Adversary::DropOldest, Adversary::DropRandom}) {
    HybridConfig cfg;
    cfg.gamma_override = 2;
    cfg.adversary = adv;
    Network net(g, cfg);
    std::vector<Envelope> sends;
    for (NodeId t = 1; t <= 5; ++t) sends.push_back({0, t, Channel::Global, {t}});
    auto got = net.exchange(sends);
    REQUIRE(got.size() == 2);
    if (adv == Adversary::DropNewest) {
      CHECK(got[0].to == 1);
      CHECK(got[1].to == 2);
    }
    if (adv == Adversary::DropOldest) {
      CHECK(got[0].to == 4);
      CHECK(got[1].to == 5);
    }
    CHECK(net.ledger().grand_total().drops == 3);
  }
}

TEST_CASE("multi-word payloads count as several messages") {
  auto g = testutil::star_graph(2);
  HybridConfig cfg;
  cfg.gamma_override = 4;
  Network net(g, cfg);
  std::vector<Envelope> sends{{1, 0, Channel::Global, {1, 2, 3}}, {2, 0, Channel::Global, {4, 5}}};
  auto got = net.exchange(sends);
  CHECK(got.size() == 1);
  CHECK(net.ledger().grand_total().global_msgs == 5);
  CHECK(net.ledger().grand_total().drops == 2);
}

TEST_CASE("local envelopes must follow edges") {
  auto g = testutil::path_graph(3);
  Network net(g, HybridConfig{});
  std::vector<Envelope> bad{{0, 2, Channel::Local, {1}}};
  CHECK_THROWS_AS(net.exchange(bad), Error);
}

TEST_CASE("max rounds guard") {
  auto g = testutil::path_graph(2);
  auto p = make_programs<Chatter>(2, std::vector<NodeId>{}, Channel::Local, 50u);
  CHECK_THROWS_AS(run_hybrid(g, p, HybridConfig{}, 10), Error);
}

TEST_CASE("flood echo finishes within diameter plus one rounds") {
  auto g = testutil::er(50, 0.2, 3, 1, 1);
  auto ecc = brute_eccentricities(g);
  Weight diam = *std::max_element(ecc.begin(), ecc.end());
  auto p = make_programs<Flood>(50);
  auto run = run_hybrid(g, p, HybridConfig{}, 1000);
  CHECK(run.rounds <= diam + 1);
  for (NodeId v = 0; v < 50; ++v) CHECK(static_cast<Flood&>(*p[v]).informed_at == static_cast<long>(hop_distances(g, 0)[v]));
}

TEST_CASE("CONGEST reduction: lambda 1 and gamma 0") {
  auto g = testutil::path_graph(12);
  HybridConfig cfg;
  cfg.lambda = 1;
  cfg.gamma_override = 0;
  auto p = make_programs<Flood>(12);
  run_hybrid(g, p, cfg, 100);
  long last = 0;
  for (auto& prog : p) last = std::max(last, static_cast<Flood&>(*prog).informed_at);
  CHECK(last == 11);  // diameter of P_12

  Network net(g, cfg);
  std::vector<Envelope> two{{0, 1, Channel::Local, {1}}, {0, 1, Channel::Local, {2}}, {0, 5, Channel::Global, {3}}};
  auto got = net.exchange(two);
  REQUIRE(got.size() == 1);
  CHECK(got[0].payload[0] == 1);
}

TEST_CASE("determinism: identical seeds give identical ledgers and transcripts") {
  auto g = testutil::er(60, 0.1, 8);
  auto once = [&](std::uint64_t seed) {
    HybridConfig cfg;
    cfg.gamma_override = 2;
    cfg.adversary = Adversary::DropRandom;
    cfg.seed = seed;
    Network net(g, cfg);
    std::ostringstream tr;
    net.set_transcript(&tr);
    ProgramList p;
    for (NodeId v = 0; v < 60; ++v)
      p.push_back(std::make_unique<Chatter>(std::vector<NodeId>{0, 1, 2, 3, 4}, Channel::Global, 3));
    run_hybrid(net, p, 10);
    return net.ledger().to_csv() + tr.str();
  };
  CHECK(once(5) == once(5));
  CHECK(once(5) != once(6));
}

TEST_CASE("ledger phases and csv") {
  auto g = testutil::path_graph(4);
  Network net(g, HybridConfig{});
  {
    auto outer = net.phase("outer");
    net.local_rounds(3, 12);
    {
      auto inner = net.phase("inner");
      net.local_rounds(2, 0);
    }
    net.local_rounds(1, 0);
  }
  CHECK(net.ledger().phase("outer").rounds == 4);
  CHECK(net.ledger().phase("inner").rounds == 2);
  CHECK(net.ledger().total_rounds() == 6);
  auto csv = net.ledger().to_csv();
  CHECK(csv.find("phase,rounds,localMsgs,globalMsgs,drops\n") == 0);
  CHECK(csv.find("outer,4,12,0,0") != std::string::npos);
}

TEST_CASE("local neighborhood broadcast") {
  auto p4 = testutil::path_graph(4);
  {
    Network net(p4, HybridConfig{});
    auto k = broadcast_local_neighborhood(net, 0, 1);
    CHECK(k.nodes == std::vector<NodeId>{0, 1});
    REQUIRE(k.edges.size() == 1);
    CHECK(k.edges[0] == Edge{0, 1, 1});
    CHECK(net.ledger().total_rounds() == 1);
  }
  {
    Network net(p4, HybridConfig{});
    auto k = broadcast_local_neighborhood(net, 0, 3);
    CHECK(k.nodes.size() == 4);
    CHECK(k.edges.size() == 3);
    CHECK(net.ledger().phase("local-view").rounds == 3);
  }
  auto g = testutil::er(100, 0.1, 42);
  Network net(g, HybridConfig{});
  std::vector<Word> ann(100);
  for (NodeId v = 0; v < 100; ++v) ann[v] = 1000 + v;
  auto k = broadcast_local_neighborhood(net, 7, 2, ann);
  CHECK(k.nodes == hop_ball(g, 7, 2));
  for (auto [u, a] : k.annotations) CHECK(a == 1000 + u);
  std::size_t induced = 0;
  for (const auto& e : g.edges())
    induced += std::binary_search(k.nodes.begin(), k.nodes.end(), e.u) &&
               std::binary_search(k.nodes.begin(), k.nodes.end(), e.v);
  CHECK(k.edges.size() == induced);
}
