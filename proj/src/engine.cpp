#include "hybrid/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "hybrid/errors.hpp"

namespace hybrid {

unsigned HybridConfig::gamma_for(std::size_t n) const {
  if (gamma_override) return *gamma_override;
  double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
  return std::max(1u, static_cast<unsigned>(std::ceil(gamma_const * lg - 1e-9)));
}

// ---- ledger ----------------------------------------------------------------

std::uint32_t RoundLedger::intern(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(label);
  totals_.emplace_back();
  index_.emplace(label, id);
  return id;
}

void RoundLedger::record(RoundRecord r) {
  r.first_round = round_;
  round_ += r.span;
  auto& t = totals_.at(r.phase);
  t.rounds += r.span;
  t.local_msgs += r.local_msgs;
  t.global_msgs += r.global_sent;
  t.drops += r.global_dropped;
  records_.push_back(r);
}

PhaseTotals RoundLedger::phase(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? PhaseTotals{} : totals_[it->second];
}

PhaseTotals RoundLedger::grand_total() const {
  PhaseTotals g;
  for (const auto& t : totals_) {
    g.rounds += t.rounds;
    g.local_msgs += t.local_msgs;
    g.global_msgs += t.global_msgs;
    g.drops += t.drops;
  }
  return g;
}

std::uint32_t RoundLedger::max_send_load() const {
  std::uint32_t m = 0;
  for (const auto& r : records_) m = std::max(m, r.max_send);
  return m;
}

std::uint32_t RoundLedger::max_recv_load() const {
  std::uint32_t m = 0;
  for (const auto& r : records_) m = std::max(m, r.max_recv);
  return m;
}

std::string RoundLedger::to_csv(bool header) const {
  std::ostringstream o;
  if (header) o << "phase,rounds,localMsgs,globalMsgs,drops\n";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& t = totals_[i];
    o << names_[i] << ',' << t.rounds << ',' << t.local_msgs << ',' << t.global_msgs << ','
      << t.drops << '\n';
  }
  return o.str();
}

// ---- network ---------------------------------------------------------------

PhaseScope::PhaseScope(Network& net, const std::string& label) : net_(&net) {
  net.phase_stack_.push_back(net.ledger_.intern(label));
}

PhaseScope::~PhaseScope() { net_->phase_stack_.pop_back(); }

Network::Network(const WeightedGraph& g, HybridConfig cfg)
    : g_(&g),
      cfg_(cfg),
      gamma_(cfg.gamma_for(g.n())),
      adversary_rng_(derive_seed(cfg.seed, 0xad7e)),
      load_a_(g.n(), 0),
      load_b_(g.n(), 0) {
  phase_stack_.push_back(ledger_.intern("misc"));
}

const std::string& Network::current_phase() const {
  return ledger_.phase_names()[phase_stack_.back()];
}

std::uint64_t Network::next_seed() { return derive_seed(cfg_.seed, 0x5eed, ++seed_counter_); }

NodeRng Network::node_rng(NodeId v, std::uint64_t salt) const {
  return NodeRng(derive_seed(cfg_.seed, salt, v));
}

void Network::finish_round(RoundRecord rec) {
  rec.phase = phase_stack_.back();
  ledger_.record(rec);
}

void Network::local_rounds(std::uint64_t rounds, std::uint64_t local_words) {
  if (rounds == 0) return;
  RoundRecord rec;
  rec.span = rounds;
  rec.local_msgs = local_words;
  finish_round(rec);
}

void Network::enforce(std::span<const std::uint32_t> candidates,
                      std::span<const std::uint32_t> key, std::size_t key_space,
                      std::span<const std::uint32_t> words, std::uint64_t budget,
                      std::vector<char>& keep, std::vector<std::uint32_t>& load,
                      std::uint32_t* max_load) {
  if (load.size() < key_space) load.resize(key_space, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> over;
  for (std::uint32_t i : candidates) {
    std::uint32_t k = key[i];
    if (load[k] == 0) touched.push_back(k);
    load[k] += words.empty() ? 1 : words[i];
  }
  for (std::uint32_t k : touched)
    if (load[k] > budget) over.push_back(k);
  if (!over.empty()) {
    std::sort(over.begin(), over.end());
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t k : over) groups[k];
    for (std::uint32_t i : candidates) {
      auto it = groups.find(key[i]);
      if (it != groups.end()) it->second.push_back(i);
    }
    for (std::uint32_t k : over) {
      auto& items = groups[k];
      if (cfg_.adversary == Adversary::DropOldest) std::reverse(items.begin(), items.end());
      if (cfg_.adversary == Adversary::DropRandom)
        portable_shuffle(items.begin(), items.end(), adversary_rng_);
      std::uint64_t used = 0;
      for (std::uint32_t i : items) {
        std::uint64_t w = words.empty() ? 1 : words[i];
        if (used + w <= budget) {
          used += w;
        } else {
          keep[i] = 0;
        }
      }
      load[k] = static_cast<std::uint32_t>(used);
    }
  }
  for (std::uint32_t k : touched) {
    if (max_load) *max_load = std::max(*max_load, load[k]);
    load[k] = 0;
  }
}

std::vector<Envelope> Network::exchange(std::vector<Envelope> sends) {
  const std::size_t count = sends.size();
  std::vector<char> keep(count, 1);
  std::vector<std::uint32_t> words(count), from(count), to(count);
  std::vector<std::uint32_t> local_idx, global_idx;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto& e = sends[i];
    if (e.from >= n() || e.to >= n()) throw Error(ErrorKind::InvalidArgument, "envelope endpoint out of range");
    words[i] = static_cast<std::uint32_t>(e.words());
    from[i] = e.from;
    to[i] = e.to;
    if (e.channel == Channel::Local) {
      if (!g_->has_edge(e.from, e.to))
        throw Error(ErrorKind::IllegalLocalEdge,
                    std::to_string(e.from) + "->" + std::to_string(e.to) + " is not an edge");
      local_idx.push_back(i);
    } else {
      global_idx.push_back(i);
    }
  }

  RoundRecord rec;
  if (cfg_.lambda && !local_idx.empty()) {
    // Dense ids for ordered (from,to) pairs.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pk;
    for (auto i : local_idx) pk.push_back({(std::uint64_t(from[i]) << 32) | to[i], i});
    std::sort(pk.begin(), pk.end());
    std::vector<std::uint32_t> pair_id(count, 0);
    std::uint32_t next = 0;
    for (std::size_t j = 0; j < pk.size(); ++j) {
      if (j > 0 && pk[j].first != pk[j - 1].first) ++next;
      pair_id[pk[j].second] = next;
    }
    std::vector<std::uint32_t> scratch;
    enforce(local_idx, pair_id, next + 1, words, *cfg_.lambda, keep, scratch, nullptr);
  }
  if (!global_idx.empty()) {
    enforce(global_idx, from, n(), words, gamma_, keep, load_a_, nullptr);
    std::vector<std::uint32_t> survivors;
    for (auto i : global_idx)
      if (keep[i]) survivors.push_back(i);
    enforce(survivors, to, n(), words, gamma_, keep, load_b_, &rec.max_recv);
    survivors.clear();
    for (auto i : global_idx)
      if (keep[i]) survivors.push_back(i);
    // Kept outgoing load after both stages.
    enforce(survivors, from, n(), words, gamma_, keep, load_a_, &rec.max_send);
  }

  std::vector<Envelope> delivered;
  delivered.reserve(count);
  const std::uint64_t round = ledger_.now();
  for (std::uint32_t i = 0; i < count; ++i) {
    bool global = sends[i].channel == Channel::Global;
    if (global) rec.global_sent += words[i];
    if (!keep[i]) {
      rec.global_dropped += words[i];
      if (transcript_)
        *transcript_ << round << ' ' << from[i] << ' ' << to[i] << (global ? " dropped " : " dropped-local ")
                     << words[i] << '\n';
      continue;
    }
    if (!global) rec.local_msgs += words[i];
    if (transcript_)
      *transcript_ << round << ' ' << from[i] << ' ' << to[i] << (global ? " global " : " local ") << words[i]
                   << '\n';
    delivered.push_back(std::move(sends[i]));
  }
  finish_round(rec);
  return delivered;
}

void Network::exchange_global(std::span<const GlobalSend> sends, std::vector<GlobalSend>& out,
                              std::uint64_t local_words) {
  const std::size_t count = sends.size();
  std::vector<char> keep(count, 1);
  std::vector<std::uint32_t> from(count), to(count), all(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    from[i] = sends[i].from;
    to[i] = sends[i].to;
    all[i] = i;
  }
  RoundRecord rec;
  rec.local_msgs = local_words;
  enforce(all, from, n(), {}, gamma_, keep, load_a_, nullptr);
  std::vector<std::uint32_t> survivors;
  for (auto i : all)
    if (keep[i]) survivors.push_back(i);
  enforce(survivors, to, n(), {}, gamma_, keep, load_b_, &rec.max_recv);
  survivors.clear();
  for (auto i : all)
    if (keep[i]) survivors.push_back(i);
  enforce(survivors, from, n(), {}, gamma_, keep, load_a_, &rec.max_send);

  const std::uint64_t round = ledger_.now();
  rec.global_sent = count;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (transcript_)
      *transcript_ << round << ' ' << from[i] << ' ' << to[i] << (keep[i] ? " global 1\n" : " dropped 1\n");
    if (keep[i]) {
      out.push_back(sends[i]);
    } else {
      ++rec.global_dropped;
    }
  }
  finish_round(rec);
}

// ---- program runner --------------------------------------------------------

std::uint64_t run_hybrid(Network& net, ProgramList& programs, std::uint64_t max_rounds) {
  const std::size_t n = net.n();
  if (programs.size() != n) throw Error(ErrorKind::InvalidArgument, "need one program per node");
  const std::uint64_t salt = net.next_seed();
  std::vector<NodeRng> rngs;
  rngs.reserve(n);
  for (NodeId v = 0; v < n; ++v) rngs.push_back(net.node_rng(v, salt));
  std::vector<char> halted(n, 0);
  std::size_t live = n;
  std::vector<std::vector<Envelope>> inbox(n);
  StepContext ctx;
  ctx.graph = &net.graph();
  ctx.gamma = net.gamma();
  std::uint64_t round = 0;
  while (live > 0) {
    if (round >= max_rounds)
      throw Error(ErrorKind::MaxRoundsExceeded, "no global halt within " + std::to_string(max_rounds) + " rounds");
    std::vector<Envelope> sends;
    for (NodeId v = 0; v < n; ++v) {
      if (halted[v]) {
        inbox[v].clear();
        continue;
      }
      ctx.self = v;
      ctx.round = round;
      ctx.rng = &rngs[v];
      StepResult r = programs[v]->step(ctx, inbox[v]);
      inbox[v].clear();
      for (auto& e : r.sends) {
        e.from = v;
        sends.push_back(std::move(e));
      }
      if (r.halt) {
        halted[v] = 1;
        --live;
      }
    }
    if (live == 0 && sends.empty()) break;
    for (auto& e : net.exchange(std::move(sends))) inbox[e.to].push_back(std::move(e));
    ++round;
  }
  return round;
}

HybridRun run_hybrid(const WeightedGraph& g, ProgramList& programs, const HybridConfig& cfg,
                     std::uint64_t max_rounds) {
  Network net(g, cfg);
  HybridRun out;
  out.rounds = run_hybrid(net, programs, max_rounds);
  out.ledger = net.ledger();
  return out;
}

}  // namespace hybrid
