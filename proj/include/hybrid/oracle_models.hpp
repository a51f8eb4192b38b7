// oracle_models.hpp - Oracle and Tiered Oracles models, abstract and simulated
//
// The abstract executors run over any graph and are pure. The simulators run
// the same rounds over a skeleton inside a Network, so their cost lands in the
// ledger under "oracle-sim" and "tiered-sim".
#pragma once

#include <cstdint>
#include <vector>

#include "hybrid/bitrows.hpp"
#include "hybrid/clique_router.hpp"
#include "hybrid/graph.hpp"
#include "hybrid/rng.hpp"
#include "hybrid/skeleton.hpp"

namespace hybrid {

enum class OracleDirection { ToOracle, FromOracle };

struct OracleRoundSpec {
  OracleDirection direction = OracleDirection::ToOracle;
  // ToOracle: words node v sends to the oracle. FromOracle: words the oracle
  // sends to v. Either way at most deg(v) of them.
  std::vector<std::vector<Word>> outbox;
};

struct OracleDelivery {
  NodeId oracle = 0;
  // ToOracle: what the oracle received from v, in order. FromOracle: what v
  // received from the oracle.
  std::vector<std::vector<Word>> words;
  bool operator==(const OracleDelivery&) const = default;
};

// argmax over (degree, id); ties go to the larger id.
NodeId select_oracle(const WeightedGraph& g);

// One abstract round. BudgetExceeded if some outbox exceeds its degree.
OracleDelivery oracle_model_round(const WeightedGraph& g, const OracleRoundSpec& spec);

struct TieredRoundSpec {
  std::vector<std::vector<Word>> broadcast;  // M_v, at most deg(v) words
};

struct TieredDelivery {
  // received_from[u]: ascending senders v whose whole M_v reached u (u itself
  // included).
  std::vector<std::vector<NodeId>> received_from;
};

// u hears v exactly when 2 deg(u) >= deg(v).
inline bool tiered_eligible(std::size_t deg_u, std::size_t deg_v) { return 2 * deg_u >= deg_v; }

TieredDelivery tiered_model_round(const WeightedGraph& g, const TieredRoundSpec& spec);

// True when every eligible pair is covered by the delivery.
bool tiered_contract_holds(const WeightedGraph& g, const TieredDelivery& d);

// Copies per message: ceil(sampler_const * 2|M| ln|M| / deg), capped at |M|.
std::uint32_t tiered_copies(std::size_t k, std::size_t deg, double sampler_const);

// xrep distinct uniform targets from [0, k), appended to out.
void sample_targets(NodeRng& rng, std::uint32_t k, std::uint32_t xrep, std::vector<std::uint32_t>& out);

// Oracle rounds simulated over a skeleton. Construction broadcasts degrees and the oracle's
// neighbor flags with two clique rounds; each later round costs one clique
// round plus one LOCAL round on the skeleton.
class OracleSimulator {
 public:
  OracleSimulator(Network& net, const SkeletonGraph& skel, CliqueRouter& router);

  NodeId oracle() const { return oracle_; }
  const std::vector<std::uint32_t>& oracle_neighbors() const { return oracle_nbrs_; }
  OracleDelivery run(const OracleRoundSpec& spec);

 private:
  Network* net_;
  const SkeletonGraph* skel_;
  CliqueRouter* router_;
  NodeId oracle_ = 0;
  std::vector<std::uint32_t> oracle_nbrs_;
};

struct TieredSimParams {
  double sampler_const = 2.0;
  unsigned max_attempts = 3;
};

struct TieredAttempt {
  TieredDelivery delivery;
  bool contract_ok = false;
  std::uint64_t copies = 0;
  std::uint64_t drops = 0;
};

// Each message of M_v goes to tiered_copies(...) random skeleton nodes over
// the clique router, then one LOCAL round lets every node collect copies held
// by its skeleton neighbors.
class TieredSimulator {
 public:
  TieredSimulator(Network& net, const SkeletonGraph& skel, CliqueRouter& router, TieredSimParams params = {});

  // One attempt followed by the completeness aggregate.
  TieredAttempt run_once(const TieredRoundSpec& spec);
  // Repeats failed attempts, charging each. Throws RoundBudgetExceeded.
  TieredDelivery run(const TieredRoundSpec& spec);
  unsigned last_attempts() const { return last_attempts_; }

 private:
  Network* net_;
  const SkeletonGraph* skel_;
  CliqueRouter* router_;
  TieredSimParams params_;
  BitRows closed_nbhd_;
  unsigned last_attempts_ = 0;
};

}  // namespace hybrid
