#include "hybrid/primitives.hpp"

#include <algorithm>
#include <cmath>

#include "hybrid/bitrows.hpp"
#include "hybrid/errors.hpp"

namespace hybrid {

Word combine_sum(Word a, Word b) { return a + b; }
Word combine_max(Word a, Word b) { return std::max(a, b); }
Word combine_min(Word a, Word b) { return std::min(a, b); }

namespace {

class TreeAggregate : public NodeProgram {
 public:
  TreeAggregate(Word value, const Combine& combine) : acc_(value), combine_(&combine) {}

  StepResult step(const StepContext& ctx, std::span<const Envelope> inbox) override {
    const std::size_t n = ctx.graph->n();
    const NodeId u = ctx.self;
    StepResult out;
    if (ctx.round == 0) pending_ = (2 * u + 1 < n) + (2 * u + 2 < n);
    for (const auto& e : inbox) {
      if (u != 0 && e.from == (u - 1) / 2) {
        result = e.payload[0];
        down_ = true;
      } else {
        acc_ = (*combine_)(acc_, e.payload[0]);
        --pending_;
      }
    }
    if (!sent_up_ && pending_ == 0) {
      sent_up_ = true;
      if (u == 0) {
        result = acc_;
        down_ = true;
      } else {
        out.sends.push_back({u, static_cast<NodeId>((u - 1) / 2), Channel::Global, {acc_}});
      }
    }
    if (down_) {
      for (NodeId c : {2 * u + 1, 2 * u + 2})
        if (c < n) out.sends.push_back({u, c, Channel::Global, {result}});
      out.halt = true;
    }
    return out;
  }

  Word result = 0;

 private:
  Word acc_;
  const Combine* combine_;
  int pending_ = 0;
  bool sent_up_ = false;
  bool down_ = false;
};

Word aggregate_with(Network& net, std::span<const Word> values, Combine c, Word id) {
  AggregateSpec spec{std::vector<Word>(values.begin(), values.end()), std::move(c), id};
  return aggregate_and_broadcast(net, spec).value;
}

}  // namespace

AggregateResult aggregate_and_broadcast(Network& net, const AggregateSpec& spec) {
  const std::size_t n = net.n();
  if (spec.values.size() != n) throw Error(ErrorKind::InvalidArgument, "one aggregate input per node");
  auto scope = net.phase("agg");
  AggregateResult out;
  if (n == 1) {
    out.value = spec.combine(spec.identity, spec.values[0]);
    out.per_node = {out.value};
    return out;
  }
  // A tree node talks to two children at once.
  if (net.gamma() < 2) throw Error(ErrorKind::InvalidArgument, "aggregation needs gamma >= 2");
  ProgramList progs;
  progs.reserve(n);
  for (NodeId v = 0; v < n; ++v) progs.push_back(std::make_unique<TreeAggregate>(spec.values[v], spec.combine));
  out.rounds = run_hybrid(net, progs, 4 * (std::bit_width(n) + 2));
  out.per_node.resize(n);
  for (NodeId v = 0; v < n; ++v) out.per_node[v] = static_cast<TreeAggregate&>(*progs[v]).result;
  out.value = out.per_node[0];
  return out;
}

Word aggregate_sum(Network& net, std::span<const Word> values) {
  return aggregate_with(net, values, combine_sum, 0);
}
Word aggregate_max(Network& net, std::span<const Word> values) {
  return aggregate_with(net, values, combine_max, 0);
}
Word aggregate_min(Network& net, std::span<const Word> values) {
  return aggregate_with(net, values, combine_min, ~Word{0});
}

// ---- token dissemination ---------------------------------------------------

std::uint64_t td_round_budget(std::size_t n, unsigned gamma, std::size_t k, std::size_t ell, double c) {
  if (k == 0) return 0;
  const double ln_n = std::log(std::max<double>(n, 2));
  const double g = std::max(1u, gamma);
  double t = c * (std::sqrt(k * ln_n / g) + ell) + std::log2(std::max<double>(n, 2)) / std::log2(g + 1);
  return static_cast<std::uint64_t>(std::ceil(t));
}

TdResult token_dissemination(Network& net, const std::vector<std::vector<Token>>& initial,
                             const TdParams& params) {
  const std::size_t n = net.n();
  if (initial.size() != n) throw Error(ErrorKind::InvalidArgument, "one token list per node");
  TdResult res;
  for (const auto& list : initial) res.tokens.insert(res.tokens.end(), list.begin(), list.end());
  std::sort(res.tokens.begin(), res.tokens.end());
  if (std::adjacent_find(res.tokens.begin(), res.tokens.end()) != res.tokens.end())
    throw Error(ErrorKind::InvalidArgument, "tokens must be distinct");
  auto index_of = [&](const Token& t) {
    return static_cast<std::size_t>(std::lower_bound(res.tokens.begin(), res.tokens.end(), t) - res.tokens.begin());
  };

  // Nodes learn k and ell by aggregation.
  std::vector<Word> counts(n);
  for (NodeId v = 0; v < n; ++v) counts[v] = initial[v].size();
  res.k = aggregate_sum(net, counts);
  res.ell = aggregate_max(net, counts);
  res.known_count.assign(n, res.k);
  if (res.k == 0) return res;

  const WeightedGraph& g = net.graph();
  const unsigned gamma = net.gamma();
  res.budget = td_round_budget(n, gamma, res.k, res.ell, params.td_const);
  const std::size_t k = res.k;
  BitRows known(n, k), before(n, k);
  std::vector<NodeId> perm(n);
  std::vector<GlobalSend> sends, delivered;

  for (unsigned attempt = 1; attempt <= params.max_attempts; ++attempt) {
    res.attempts = attempt;
    const std::uint64_t shared_seed = net.next_seed();
    known.clear();
    for (NodeId v = 0; v < n; ++v)
      for (const auto& t : initial[v]) known.set(v, index_of(t));
    {
      auto scope = net.phase("td");
      for (std::uint64_t r = 0; r < res.budget; ++r) {
        before = known;
        // Global pushes chosen from knowledge at the start of the round.
        sends.clear();
        delivered.clear();
        if (gamma > 0 && n > 1) {
          Rng shared(derive_seed(shared_seed, r));
          for (NodeId i = 0; i < n; ++i) perm[i] = i;
          portable_shuffle(perm.begin(), perm.end(), shared);
          for (NodeId u = 0; u < n; ++u) {
            NodeRng rng = net.node_rng(u, derive_seed(shared_seed, r, 1));
            for (unsigned j = 0; j < gamma; ++j) {
              NodeId target = perm[(u + j) % n];
              if (target == u) continue;
              std::size_t tok = before.next_set_cyclic(u, uniform_below(rng, k));
              if (tok >= k) break;
              sends.push_back({u, target, tok});
            }
          }
        }
        // Local: each node forwards what it learned last round to all neighbors.
        std::uint64_t local_words = 0;
        for (NodeId u = 0; u < n; ++u) {
          auto dst = known.row(u);
          for (const Arc& a : g.neighbors(u)) or_into(dst, before.row(a.to));
          local_words += (known.count(u) - before.count(u)) * g.degree(u);
        }
        net.exchange_global(sends, delivered, local_words);
        for (const auto& s : delivered) known.set(s.to, s.tag);
      }
    }
    std::vector<Word> complete(n);
    for (NodeId v = 0; v < n; ++v) {
      res.known_count[v] = known.count(v);
      complete[v] = res.known_count[v] == k;
    }
    if (aggregate_min(net, complete) == 1) return res;
  }
  throw Error(ErrorKind::RoundBudgetExceeded,
              "token dissemination incomplete after " + std::to_string(params.max_attempts) + " attempts");
}

// ---- word packing ----------------------------------------------------------

namespace {
constexpr unsigned kValueBits = 40;
constexpr Word kValueMask = (Word{1} << kValueBits) - 1;
}  // namespace

Word pack_id_value(NodeId id, Weight value) {
  if (id >= (NodeId{1} << (64 - kValueBits)))
    throw Error(ErrorKind::PayloadTooLarge, "node id does not fit a packed word");
  Word v = value == kInfinity ? kValueMask : value;
  if (value != kInfinity && value >= kValueMask)
    throw Error(ErrorKind::PayloadTooLarge, "distance does not fit a packed word");
  return (Word{id} << kValueBits) | v;
}

NodeId unpack_id(Word w) { return static_cast<NodeId>(w >> kValueBits); }

Weight unpack_value(Word w) {
  Word v = w & kValueMask;
  return v == kValueMask ? kInfinity : v;
}

}  // namespace hybrid
