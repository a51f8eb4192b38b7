#include "hybrid/oracle_models.hpp"

#include <algorithm>
#include <cmath>

#include "hybrid/errors.hpp"
#include "hybrid/primitives.hpp"

namespace hybrid {

namespace {

void check_budget(const WeightedGraph& g, const std::vector<std::vector<Word>>& per_node) {
  if (per_node.size() != g.n()) throw Error(ErrorKind::InvalidArgument, "one outbox per node");
  for (NodeId v = 0; v < g.n(); ++v)
    if (per_node[v].size() > g.degree(v))
      throw Error(ErrorKind::BudgetExceeded, "node " + std::to_string(v) + " has " +
                                                 std::to_string(per_node[v].size()) + " words but degree " +
                                                 std::to_string(g.degree(v)));
}

}  // namespace

NodeId select_oracle(const WeightedGraph& g) {
  NodeId best = 0;
  for (NodeId v = 1; v < g.n(); ++v)
    if (g.degree(v) >= g.degree(best)) best = v;
  return best;
}

OracleDelivery oracle_model_round(const WeightedGraph& g, const OracleRoundSpec& spec) {
  check_budget(g, spec.outbox);
  return {select_oracle(g), spec.outbox};
}

TieredDelivery tiered_model_round(const WeightedGraph& g, const TieredRoundSpec& spec) {
  check_budget(g, spec.broadcast);
  TieredDelivery d;
  d.received_from.resize(g.n());
  for (NodeId u = 0; u < g.n(); ++u)
    for (NodeId v = 0; v < g.n(); ++v)
      if (tiered_eligible(g.degree(u), g.degree(v))) d.received_from[u].push_back(v);
  return d;
}

bool tiered_contract_holds(const WeightedGraph& g, const TieredDelivery& d) {
  if (d.received_from.size() != g.n()) return false;
  for (NodeId u = 0; u < g.n(); ++u) {
    const auto& got = d.received_from[u];
    for (NodeId v = 0; v < g.n(); ++v)
      if (tiered_eligible(g.degree(u), g.degree(v)) && !std::binary_search(got.begin(), got.end(), v)) return false;
  }
  return true;
}

std::uint32_t tiered_copies(std::size_t k, std::size_t deg, double sampler_const) {
  if (k == 0) return 0;
  if (deg == 0) return static_cast<std::uint32_t>(k);
  double kk = static_cast<double>(k);
  double x = std::ceil(sampler_const * 2.0 * kk * std::log(kk) / static_cast<double>(deg));
  return static_cast<std::uint32_t>(std::clamp(x, 1.0, kk));
}

void sample_targets(NodeRng& rng, std::uint32_t k, std::uint32_t xrep, std::vector<std::uint32_t>& out) {
  if (xrep >= k) {
    for (std::uint32_t t = 0; t < k; ++t) out.push_back(t);
    return;
  }
  // Floyd's algorithm; the stamp array makes membership O(1).
  thread_local std::vector<std::uint64_t> stamp;
  thread_local std::uint64_t epoch = 0;
  if (stamp.size() < k) stamp.assign(k, 0);
  ++epoch;
  for (std::uint32_t j = k - xrep; j < k; ++j) {
    auto t = static_cast<std::uint32_t>(uniform_below(rng, j + 1));
    if (stamp[t] == epoch) t = j;
    stamp[t] = epoch;
    out.push_back(t);
  }
}

// ---- Oracle simulation -----------------------------------------------------

OracleSimulator::OracleSimulator(Network& net, const SkeletonGraph& skel, CliqueRouter& router)
    : net_(&net), skel_(&skel), router_(&router) {
  const auto& s = skel.overlay;
  const auto k = static_cast<std::uint32_t>(skel.size());
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "oracle simulation needs a nonempty skeleton");
  oracle_ = select_oracle(s);
  for (const Arc& a : s.neighbors(oracle_)) oracle_nbrs_.push_back(a.to);
  if (k == 1) return;

  // Degrees, then "am I a neighbor of the oracle", both all-to-all.
  std::vector<CliqueWord> words;
  words.reserve(std::size_t{k} * (k - 1));
  for (int pass = 0; pass < 2; ++pass) {
    words.clear();
    for (std::uint32_t i = 0; i < k; ++i) {
      Word w = pass == 0 ? s.degree(i) : static_cast<Word>(s.has_edge(i, oracle_));
      for (std::uint32_t j = 0; j < k; ++j)
        if (i != j) words.push_back({i, j, w});
    }
    if (router.round(words, "oracle-sim").size() != words.size())
      throw Error(ErrorKind::RoundBudgetExceeded, "oracle setup lost clique words");
  }
}

OracleDelivery OracleSimulator::run(const OracleRoundSpec& spec) {
  const auto& s = skel_->overlay;
  check_budget(s, spec.outbox);
  const std::size_t k = skel_->size();
  OracleDelivery out{oracle_, std::vector<std::vector<Word>>(k)};
  if (k == 1) return out;

  std::vector<std::uint32_t> rank(k, 0);
  for (std::uint32_t t = 0; t < oracle_nbrs_.size(); ++t) rank[oracle_nbrs_[t]] = t;
  std::uint64_t total = 0;
  for (const auto& o : spec.outbox) total += o.size();

  // The t-th word of v travels through the oracle's t-th neighbor.
  std::vector<CliqueWord> words;
  std::vector<std::vector<std::pair<std::uint32_t, Word>>> got(k);
  const bool to_oracle = spec.direction == OracleDirection::ToOracle;
  for (std::uint32_t v = 0; v < k; ++v)
    for (std::uint32_t t = 0; t < spec.outbox[v].size(); ++t) {
      std::uint32_t w = oracle_nbrs_[t];
      if (w == v) {
        got[v].push_back({t, spec.outbox[v][t]});
      } else {
        words.push_back(to_oracle ? CliqueWord{v, w, spec.outbox[v][t]} : CliqueWord{w, v, spec.outbox[v][t]});
      }
    }
  if (!to_oracle) charge_local_sim(*net_, *skel_, total, "oracle-sim");
  for (const auto& cw : router_->round(words, "oracle-sim")) {
    std::uint32_t v = to_oracle ? cw.from : cw.to;
    std::uint32_t w = to_oracle ? cw.to : cw.from;
    got[v].push_back({rank[w], cw.word});
  }
  if (to_oracle) charge_local_sim(*net_, *skel_, total, "oracle-sim");

  for (std::uint32_t v = 0; v < k; ++v) {
    std::sort(got[v].begin(), got[v].end());
    for (const auto& [t, w] : got[v]) out.words[v].push_back(w);
  }
  return out;
}

// ---- Tiered simulation -----------------------------------------------------

TieredSimulator::TieredSimulator(Network& net, const SkeletonGraph& skel, CliqueRouter& router,
                                 TieredSimParams params)
    : net_(&net), skel_(&skel), router_(&router), params_(params), closed_nbhd_(skel.size(), skel.size()) {
  for (std::uint32_t v = 0; v < skel.size(); ++v) {
    closed_nbhd_.set(v, v);
    for (const Arc& a : skel.overlay.neighbors(v)) closed_nbhd_.set(v, a.to);
  }
}

TieredAttempt TieredSimulator::run_once(const TieredRoundSpec& spec) {
  const auto& s = skel_->overlay;
  check_budget(s, spec.broadcast);
  const auto k = static_cast<std::uint32_t>(skel_->size());
  TieredAttempt res;
  res.delivery.received_from.resize(k);
  if (k <= 1) {
    if (k == 1) res.delivery.received_from[0] = {0};
    res.contract_ok = true;
    return res;
  }

  auto scope = net_->phase("tiered-sim");
  const std::uint64_t salt = net_->next_seed();
  std::vector<std::uint16_t> mult(std::size_t{k} * k, 0);
  std::vector<std::uint64_t> held(k, 0);
  BitRows full(k, k);
  std::vector<std::uint64_t> cover(full.stride());
  std::vector<std::uint32_t> targets;
  for (std::uint32_t v = 0; v < k; ++v) {
    full.fill_row(v);
    NodeRng rng = net_->node_rng(skel_->members[v], salt);
    const std::uint32_t xrep = tiered_copies(k, s.degree(v), params_.sampler_const);
    for (std::size_t m = 0; m < spec.broadcast[v].size(); ++m) {
      targets.clear();
      sample_targets(rng, k, xrep, targets);
      std::fill(cover.begin(), cover.end(), 0);
      for (auto t : targets) {
        or_into(cover, closed_nbhd_.row(t));
        ++held[t];
        if (t != v) ++mult[std::size_t{v} * k + t];
      }
      res.copies += targets.size();
      and_into(full.row(v), cover);
    }
  }
  res.drops = router_->route_counts(mult, "tiered-sim");
  std::uint64_t local_words = 0;
  for (std::uint32_t t = 0; t < k; ++t) local_words += held[t] * s.degree(t);
  charge_local_sim(*net_, *skel_, local_words, "tiered-sim");

  for (std::uint32_t v = 0; v < k; ++v)
    for (std::uint32_t u = 0; u < k; ++u)
      if (full.test(v, u)) res.delivery.received_from[u].push_back(v);

  // Each node checks it heard every sender it is eligible for; the network
  // agrees on the verdict by a min-aggregate.
  std::vector<Word> ok(net_->n(), 1);
  for (std::uint32_t u = 0; u < k; ++u)
    for (std::uint32_t v = 0; v < k; ++v)
      if (tiered_eligible(s.degree(u), s.degree(v)) && !full.test(v, u)) ok[skel_->members[u]] = 0;
  if (res.drops > 0) ok[skel_->members[0]] = 0;
  res.contract_ok = aggregate_min(*net_, ok) == 1;
  return res;
}

TieredDelivery TieredSimulator::run(const TieredRoundSpec& spec) {
  for (last_attempts_ = 1; last_attempts_ <= params_.max_attempts; ++last_attempts_) {
    TieredAttempt a = run_once(spec);
    if (a.contract_ok) return std::move(a.delivery);
  }
  last_attempts_ = params_.max_attempts;
  throw Error(ErrorKind::RoundBudgetExceeded, "tiered round failed " + std::to_string(params_.max_attempts) + " times");
}

}  // namespace hybrid
