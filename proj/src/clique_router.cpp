#include "hybrid/clique_router.hpp"

#include <algorithm>
#include <numeric>

#include "hybrid/errors.hpp"
#include "hybrid/primitives.hpp"

namespace hybrid {

std::vector<std::vector<LocalSimDelivery>> local_sim_round(Network& net, const SkeletonGraph& skel,
                                                           const std::vector<std::vector<Word>>& payloads,
                                                           const std::string& label) {
  if (payloads.size() != skel.size()) throw Error(ErrorKind::InvalidArgument, "one payload per skeleton node");
  std::vector<std::vector<LocalSimDelivery>> out(skel.size());
  std::uint64_t words = 0;
  for (NodeId i = 0; i < skel.size(); ++i) {
    if (payloads[i].empty()) continue;
    for (const Arc& a : skel.overlay.neighbors(i)) {
      out[a.to].push_back({i, payloads[i]});
      words += payloads[i].size();
    }
  }
  charge_local_sim(net, skel, words, label);
  return out;
}

void charge_local_sim(Network& net, const SkeletonGraph& skel, std::uint64_t words, const std::string& label) {
  auto scope = net.phase(label);
  net.local_rounds(skel.h, words);
}

namespace {

// Hop distance from every helper to the skeleton node it serves. Each BFS
// stops once all helpers of that node are found.
std::vector<Word> helper_hops(const WeightedGraph& g, const SkeletonGraph& skel,
                              const std::vector<std::vector<NodeId>>& helpers) {
  std::vector<Word> out(g.n(), 0);
  std::vector<std::uint32_t> seen(g.n(), 0);
  std::vector<Word> depth(g.n(), 0);
  std::vector<NodeId> queue;
  for (std::size_t i = 0; i < helpers.size(); ++i) {
    const auto epoch = static_cast<std::uint32_t>(i + 1);
    std::size_t left = helpers[i].size() - 1;  // the member helps itself at distance 0
    queue.assign(1, skel.members[i]);
    seen[skel.members[i]] = epoch;
    depth[skel.members[i]] = 0;
    const auto want = static_cast<std::int32_t>(i);
    for (std::size_t q = 0; q < queue.size() && left > 0; ++q) {
      const NodeId v = queue[q];
      if (depth[v] >= skel.h) continue;
      for (const Arc& a : g.neighbors(v)) {
        if (seen[a.to] == epoch) continue;
        seen[a.to] = epoch;
        depth[a.to] = depth[v] + 1;
        queue.push_back(a.to);
        if (skel.views[a.to].helper_of == want && a.to != skel.members[i]) {
          out[a.to] = depth[a.to];
          --left;
        }
      }
    }
    if (left > 0) throw Error(ErrorKind::InvalidArgument, "helper outside the hop radius of its skeleton node");
  }
  return out;
}

}  // namespace

CliqueRouter::CliqueRouter(Network& net, const SkeletonGraph& skel)
    : net_(&net), skel_(&skel), k_(skel.size()) {
  if (net.gamma() == 0) throw Error(ErrorKind::InvalidArgument, "clique routing needs gamma >= 1");
  auto scope = net.phase("cc-sim");
  const std::size_t n = net.n();
  helpers_.assign(k_, {});
  for (std::size_t i = 0; i < k_; ++i) helpers_[i].push_back(skel.members[i]);
  for (NodeId u = 0; u < n; ++u) {
    auto i = skel.views[u].helper_of;
    if (i >= 0 && skel.members[i] != u) helpers_[i].push_back(u);
  }
  count_.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) count_[i] = static_cast<std::uint32_t>(helpers_[i].size());
  // Helpers announce themselves and learn their rank over h-hop local paths.
  net.local_rounds(2 * static_cast<std::uint64_t>(skel.h), 2 * n);
  const auto hops = helper_hops(net.graph(), skel, helpers_);
  window_ = static_cast<unsigned>(aggregate_max(net, hops));

  std::vector<std::vector<Token>> tokens(n);
  for (std::size_t i = 0; i < k_; ++i) tokens[skel.members[i]].push_back({skel.members[i], count_[i]});
  token_dissemination(net, tokens);

  build_schedule();

  // Receiving helpers register at their relays along the stage-B slots.
  std::vector<std::vector<GlobalSend>> by_slot(slots_b_);
  for (std::uint32_t i = 0; i < k_; ++i)
    for (std::uint32_t j = 0; j < k_; ++j) {
      if (i == j) continue;
      NodeId b = receiver_helper(i, j), r = relay(i, j);
      if (b != r) by_slot[slot_b_[i * k_ + j]].push_back({b, r, 0});
    }
  std::vector<GlobalSend> sink;
  for (auto& sends : by_slot) {
    sink.clear();
    net.exchange_global(sends, sink);
    drops_ += sends.size() - sink.size();
  }
}

NodeId CliqueRouter::sender_helper(std::uint32_t i, std::uint32_t j) const {
  return helpers_[i][j % count_[i]];
}
NodeId CliqueRouter::receiver_helper(std::uint32_t i, std::uint32_t j) const {
  return helpers_[j][i % count_[j]];
}
NodeId CliqueRouter::relay(std::uint32_t i, std::uint32_t j) const {
  return static_cast<NodeId>((static_cast<std::uint64_t>(i) * k_ + j) % net_->n());
}

namespace {

// Greedy first-fit of (sender, receiver) transfers into slots of capacity gamma.
class SlotPacker {
 public:
  SlotPacker(std::size_t n, unsigned gamma) : gamma_(gamma), out_(n), in_(n), ff_out_(n, 0), ff_in_(n, 0) {}

  std::uint32_t place(NodeId a, NodeId b) {
    std::uint32_t s = std::max(ff_out_[a], ff_in_[b]);
    while (load(out_[a], s) >= gamma_ || load(in_[b], s) >= gamma_) ++s;
    bump(out_[a], s);
    bump(in_[b], s);
    advance(out_[a], ff_out_[a]);
    advance(in_[b], ff_in_[b]);
    used_ = std::max<std::uint64_t>(used_, s + 1);
    return s;
  }
  std::uint64_t used() const { return used_; }

 private:
  static std::uint32_t load(const std::vector<std::uint32_t>& v, std::uint32_t s) { return s < v.size() ? v[s] : 0; }
  static void bump(std::vector<std::uint32_t>& v, std::uint32_t s) {
    if (v.size() <= s) v.resize(s + 1, 0);
    ++v[s];
  }
  void advance(const std::vector<std::uint32_t>& v, std::uint32_t& ff) const {
    while (ff < v.size() && v[ff] >= gamma_) ++ff;
  }

  unsigned gamma_;
  std::vector<std::vector<std::uint32_t>> out_, in_;
  std::vector<std::uint32_t> ff_out_, ff_in_;
  std::uint64_t used_ = 0;
};

}  // namespace

void CliqueRouter::build_schedule() {
  const std::size_t n = net_->n();
  slot_a_.assign(k_ * k_, 0);
  slot_b_.assign(k_ * k_, 0);
  SlotPacker a(n, net_->gamma()), b(n, net_->gamma());
  for (std::uint32_t i = 0; i < k_; ++i)
    for (std::uint32_t j = 0; j < k_; ++j) {
      if (i == j) continue;
      NodeId s = sender_helper(i, j), r = relay(i, j), t = receiver_helper(i, j);
      if (s != r) slot_a_[i * k_ + j] = a.place(s, r);
      if (r != t) slot_b_[i * k_ + j] = b.place(r, t);
    }
  slots_a_ = a.used();
  slots_b_ = b.used();
}

void CliqueRouter::sub_round(const std::vector<Item>& items, std::vector<std::uint32_t>& delivered) {
  auto stage = [&](const std::vector<Item>& in, const std::vector<std::uint32_t>& slot_of, std::uint64_t slots,
                   bool first, std::vector<Item>& arrived) {
    std::vector<std::vector<Item>> buckets(slots);
    for (const Item& it : in) {
      std::uint32_t i = it.pair / static_cast<std::uint32_t>(k_), j = it.pair % static_cast<std::uint32_t>(k_);
      NodeId from = first ? sender_helper(i, j) : relay(i, j);
      NodeId to = first ? relay(i, j) : receiver_helper(i, j);
      if (from == to) {
        arrived.push_back(it);
      } else {
        buckets[slot_of[it.pair]].push_back(it);
      }
    }
    std::vector<GlobalSend> sends, got;
    for (const auto& bucket : buckets) {
      sends.clear();
      got.clear();
      for (std::uint32_t x = 0; x < bucket.size(); ++x) {
        std::uint32_t i = bucket[x].pair / static_cast<std::uint32_t>(k_), j = bucket[x].pair % static_cast<std::uint32_t>(k_);
        sends.push_back({first ? sender_helper(i, j) : relay(i, j), first ? relay(i, j) : receiver_helper(i, j), x});
      }
      net_->exchange_global(sends, got);
      drops_ += sends.size() - got.size();
      for (const auto& g : got) arrived.push_back(bucket[g.tag]);
    }
  };
  std::vector<Item> mid, done;
  stage(items, slot_a_, slots_a_, true, mid);
  stage(mid, slot_b_, slots_b_, false, done);
  for (const Item& it : done) delivered.push_back(it.id);
}

std::vector<CliqueWord> CliqueRouter::round(std::span<const CliqueWord> words, const std::string& label) {
  std::vector<std::uint64_t> keys;
  keys.reserve(words.size());
  for (const auto& w : words) keys.push_back(static_cast<std::uint64_t>(w.from) * k_ + w.to);
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
    throw Error(ErrorKind::PayloadTooLarge, "more than one word for an ordered skeleton pair");
  return batch(words, label);
}

std::vector<CliqueWord> CliqueRouter::batch(std::span<const CliqueWord> words, const std::string& label) {
  auto scope = net_->phase(label);
  for (const auto& w : words)
    if (w.from >= k_ || w.to >= k_ || w.from == w.to)
      throw Error(ErrorKind::InvalidArgument, "clique words need distinct skeleton endpoints");
  std::vector<std::uint32_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  auto pair_of = [&](std::uint32_t x) { return words[x].from * static_cast<std::uint32_t>(k_) + words[x].to; };
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pair_of(a) < pair_of(b); });
  std::vector<std::vector<Item>> rounds;
  for (std::size_t x = 0, copy = 0; x < order.size(); ++x) {
    copy = (x > 0 && pair_of(order[x]) == pair_of(order[x - 1])) ? copy + 1 : 0;
    if (rounds.size() <= copy) rounds.resize(copy + 1);
    rounds[copy].push_back({pair_of(order[x]), order[x]});
  }
  if (rounds.empty() && k_ >= 2) rounds.resize(1);
  net_->local_rounds(window_, words.size());
  std::vector<std::uint32_t> got;
  for (const auto& items : rounds) sub_round(items, got);
  net_->local_rounds(window_, got.size());
  std::sort(got.begin(), got.end());
  std::vector<CliqueWord> out;
  out.reserve(got.size());
  for (auto id : got) out.push_back(words[id]);
  return out;
}

std::uint64_t CliqueRouter::route_counts(const std::vector<std::uint16_t>& mult, const std::string& label) {
  if (mult.size() != k_ * k_) throw Error(ErrorKind::InvalidArgument, "traffic matrix must be |M| x |M|");
  auto scope = net_->phase(label);
  std::uint32_t rounds = k_ >= 2 ? 1 : 0;
  std::uint64_t total = 0;
  for (std::uint32_t p = 0; p < mult.size(); ++p) {
    if (mult[p] && p / k_ == p % k_) throw Error(ErrorKind::InvalidArgument, "self traffic in clique matrix");
    rounds = std::max<std::uint32_t>(rounds, mult[p]);
    total += mult[p];
  }
  net_->local_rounds(window_, total);
  std::vector<Item> items;
  std::vector<std::uint32_t> got;
  for (std::uint32_t b = 0; b < rounds; ++b) {
    items.clear();
    for (std::uint32_t p = 0; p < mult.size(); ++p)
      if (mult[p] > b) items.push_back({p, p});
    sub_round(items, got);
  }
  net_->local_rounds(window_, got.size());
  return total - got.size();
}

}  // namespace hybrid
