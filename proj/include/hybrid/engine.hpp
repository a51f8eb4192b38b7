// engine.hpp - synchronous round executor for the Hybrid model
//
// Local channel: any number of words per graph edge per round (optionally
// capped at lambda). Global channel: any node may address any node, but each
// node keeps at most gamma sent words and at most gamma received words per
// round; the configured adversary picks what is dropped.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybrid/graph.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

using Word = std::uint64_t;

enum class Channel : std::uint8_t { Local, Global };

struct Envelope {
  NodeId from = 0;
  NodeId to = 0;
  Channel channel = Channel::Local;
  std::vector<Word> payload;
  // An empty payload still costs one word.
  std::size_t words() const { return payload.empty() ? 1 : payload.size(); }
};

enum class Adversary { DropNewest, DropOldest, DropRandom };

struct HybridConfig {
  double gamma_const = 4.0;
  std::optional<unsigned> gamma_override;  // 0 is allowed and disables the global channel
  std::optional<unsigned> lambda;          // nullopt = unbounded local bandwidth
  Adversary adversary = Adversary::DropNewest;
  std::uint64_t seed = 0;

  unsigned gamma_for(std::size_t n) const;
};

struct PhaseTotals {
  std::uint64_t rounds = 0;
  std::uint64_t local_msgs = 0;
  std::uint64_t global_msgs = 0;
  std::uint64_t drops = 0;
};

// One executed round, or a block of `span` identical pure-local rounds.
struct RoundRecord {
  std::uint64_t first_round = 0;
  std::uint64_t span = 1;
  std::uint32_t phase = 0;  // index into RoundLedger::phase_names()
  std::uint64_t local_msgs = 0;
  std::uint64_t global_sent = 0;     // words handed to the channel
  std::uint64_t global_dropped = 0;
  std::uint32_t max_send = 0;  // largest per-node kept outgoing global load
  std::uint32_t max_recv = 0;  // largest per-node delivered global load
};

class RoundLedger {
 public:
  std::uint64_t total_rounds() const { return round_; }
  PhaseTotals phase(const std::string& label) const;
  const std::vector<std::string>& phase_names() const { return names_; }
  const std::vector<PhaseTotals>& phase_totals() const { return totals_; }
  const std::vector<RoundRecord>& records() const { return records_; }
  PhaseTotals grand_total() const;
  std::uint32_t max_send_load() const;
  std::uint32_t max_recv_load() const;

  // phase,rounds,localMsgs,globalMsgs,drops
  std::string to_csv(bool header = true) const;

  std::uint32_t intern(const std::string& label);
  void record(RoundRecord r);
  std::uint64_t now() const { return round_; }

 private:
  std::uint64_t round_ = 0;
  std::vector<std::string> names_;
  std::vector<PhaseTotals> totals_;
  std::map<std::string, std::uint32_t> index_;
  std::vector<RoundRecord> records_;
};

// Payload-free one-word global send used by bulk protocols.
struct GlobalSend {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t tag = 0;
};

class Network;

class PhaseScope {
 public:
  PhaseScope(Network& net, const std::string& label);
  ~PhaseScope();
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

 private:
  Network* net_;
};

class Network {
 public:
  Network(const WeightedGraph& g, HybridConfig cfg);

  const WeightedGraph& graph() const { return *g_; }
  const HybridConfig& config() const { return cfg_; }
  std::size_t n() const { return g_->n(); }
  unsigned gamma() const { return gamma_; }
  RoundLedger& ledger() { return ledger_; }
  const RoundLedger& ledger() const { return ledger_; }

  // Charges the innermost open phase; "misc" when none is open.
  PhaseScope phase(const std::string& label) { return PhaseScope(*this, label); }
  const std::string& current_phase() const;

  // One round of envelopes; returns the delivered ones in input order.
  // Callers list each sender's envelopes in emission order, senders ascending.
  std::vector<Envelope> exchange(std::vector<Envelope> sends);

  // One round of one-word global sends; delivered sends are appended to out.
  // local_words accounts for local traffic the caller evaluates in bulk.
  void exchange_global(std::span<const GlobalSend> sends, std::vector<GlobalSend>& out,
                       std::uint64_t local_words = 0);

  // Block of pure-local rounds whose fixed point is computed by the caller.
  void local_rounds(std::uint64_t rounds, std::uint64_t local_words);

  // Fresh deterministic seed for a randomized phase; advances an internal counter.
  std::uint64_t next_seed();
  NodeRng node_rng(NodeId v, std::uint64_t salt) const;

  void set_transcript(std::ostream* out) { transcript_ = out; }

 private:
  friend class PhaseScope;
  void finish_round(RoundRecord rec);
  // Marks keep[i]=0 for items over budget within their key group.
  void enforce(std::span<const std::uint32_t> candidates, std::span<const std::uint32_t> key,
               std::size_t key_space, std::span<const std::uint32_t> words, std::uint64_t budget,
               std::vector<char>& keep, std::vector<std::uint32_t>& kept_load_scratch,
               std::uint32_t* max_load);

  const WeightedGraph* g_;
  HybridConfig cfg_;
  unsigned gamma_;
  RoundLedger ledger_;
  std::vector<std::uint32_t> phase_stack_;
  std::uint64_t seed_counter_ = 0;
  Rng adversary_rng_;
  std::ostream* transcript_ = nullptr;
  std::vector<std::uint32_t> load_a_, load_b_;
};

struct StepContext {
  NodeId self = 0;
  std::uint64_t round = 0;  // rounds since this run started
  const WeightedGraph* graph = nullptr;
  unsigned gamma = 0;
  NodeRng* rng = nullptr;
};

struct StepResult {
  std::vector<Envelope> sends;
  bool halt = false;
};

class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual StepResult step(const StepContext& ctx, std::span<const Envelope> inbox) = 0;
};

using ProgramList = std::vector<std::unique_ptr<NodeProgram>>;

// Steps every non-halted node each round until all have halted. Envelopes
// sent in round r are in the receiver's inbox in round r+1. Throws
// MaxRoundsExceeded when max_rounds pass without global halt.
std::uint64_t run_hybrid(Network& net, ProgramList& programs, std::uint64_t max_rounds);

struct HybridRun {
  std::uint64_t rounds = 0;
  RoundLedger ledger;
};
HybridRun run_hybrid(const WeightedGraph& g, ProgramList& programs, const HybridConfig& cfg,
                     std::uint64_t max_rounds);

}  // namespace hybrid
