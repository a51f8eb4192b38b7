// distance_algos.hpp - shortest-path, eccentricity and diameter algorithms
//
// Every algorithm runs inside a Network, so its cost is the ledger of that
// network. Randomized pipelines retry from scratch on a retryable Error with
// fresh seeds drawn from the network; AlgoContext counts those retries.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hybrid/clique_router.hpp"
#include "hybrid/engine.hpp"
#include "hybrid/graph.hpp"
#include "hybrid/oracle_models.hpp"
#include "hybrid/primitives.hpp"
#include "hybrid/skeleton.hpp"

namespace hybrid {

struct AlgoParams {
  double h_const = 2.0;
  double sampler_const = 2.0;  // tiered copies
  double theta = 1.0;          // sparse/dense split for given sources
  double reassign_k = 1.0;     // skeleton helpers per dense source, in expectation
  TdParams td;
  unsigned max_retries = 4;
};

struct AlgoContext {
  Network& net;
  AlgoParams params;
  unsigned retries = 0;         // whole-pipeline restarts
  unsigned tiered_retries = 0;  // extra tiered attempts
  std::size_t skeleton_size = 0;
  unsigned hop_radius = 0;
};

// ---- model backends --------------------------------------------------------

struct ModelCost {
  std::uint64_t oracle_rounds = 0;
  std::uint64_t tiered_rounds = 0;
  std::uint64_t clique_rounds = 0;
};

// Oracle-model rounds over some graph.
class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual const WeightedGraph& graph() const = 0;
  virtual OracleDelivery round(const OracleRoundSpec& spec) = 0;
  ModelCost cost;
};

class AbstractOracleBackend : public OracleBackend {
 public:
  explicit AbstractOracleBackend(const WeightedGraph& g) : g_(&g) {}
  const WeightedGraph& graph() const override { return *g_; }
  OracleDelivery round(const OracleRoundSpec& spec) override;

 private:
  const WeightedGraph* g_;
};

class SimulatedOracleBackend : public OracleBackend {
 public:
  SimulatedOracleBackend(const SkeletonGraph& skel, OracleSimulator& sim) : skel_(&skel), sim_(&sim) {}
  const WeightedGraph& graph() const override { return skel_->overlay; }
  OracleDelivery round(const OracleRoundSpec& spec) override;

 private:
  const SkeletonGraph* skel_;
  OracleSimulator* sim_;
};

// Tiered Oracles plus Congested Clique rounds over some graph.
class CliqueBackend {
 public:
  virtual ~CliqueBackend() = default;
  virtual const WeightedGraph& graph() const = 0;
  virtual TieredDelivery tiered_round(const TieredRoundSpec& spec) = 0;
  // At most one word per ordered pair.
  virtual std::vector<CliqueWord> clique_round(std::span<const CliqueWord> words) = 0;
  ModelCost cost;
};

class AbstractCliqueBackend : public CliqueBackend {
 public:
  explicit AbstractCliqueBackend(const WeightedGraph& g) : g_(&g) {}
  const WeightedGraph& graph() const override { return *g_; }
  TieredDelivery tiered_round(const TieredRoundSpec& spec) override;
  std::vector<CliqueWord> clique_round(std::span<const CliqueWord> words) override;

 private:
  const WeightedGraph* g_;
};

class SimulatedCliqueBackend : public CliqueBackend {
 public:
  SimulatedCliqueBackend(const SkeletonGraph& skel, CliqueRouter& router, TieredSimulator& tiered)
      : skel_(&skel), router_(&router), tiered_(&tiered) {}
  const WeightedGraph& graph() const override { return skel_->overlay; }
  TieredDelivery tiered_round(const TieredRoundSpec& spec) override;
  std::vector<CliqueWord> clique_round(std::span<const CliqueWord> words) override;
  unsigned extra_tiered_attempts = 0;

 private:
  const SkeletonGraph* skel_;
  CliqueRouter* router_;
  TieredSimulator* tiered_;
};

// ---- model-level algorithms ------------------------------------------------

// Two oracle rounds: edges up, distances down. Unreachable nodes keep kInfinity.
DistanceVector oracle_sssp(OracleBackend& backend, NodeId s);

// Tier of a node with degree deg >= 1: floor(log2 deg).
unsigned degree_tier(std::size_t deg);
// One tiered round, then one clique round per tier from ceil(log2 |V|)-1 down
// to 0. The observer sees the table after each tier (rows are what each node
// knows). Returns |V| x |V|.
using TierObserver = std::function<void(unsigned tier, const DistanceTable& known)>;
DistanceTable tiered_apsp(CliqueBackend& backend, const TierObserver& observer = {});

// ---- Hybrid algorithms -----------------------------------------------------

// Sample marks at x = 2/3 (forcing s), build the skeleton, two simulated
// oracle rounds, extend. Exact with high probability.
DistanceVector hybrid_exact_sssp(AlgoContext& ctx, NodeId s);

// Exact distances among skeleton members, |M| x |M| by skeleton index.
DistanceTable skeleton_apsp(AlgoContext& ctx, const SkeletonGraph& skel, CliqueRouter& router);
DistanceTable skeleton_apsp(AlgoContext& ctx, const SkeletonGraph& skel);

struct SampledSkeletonApsp {
  SkeletonGraph skel;
  DistanceTable apsp;
};
// Sample marks at x, build the skeleton and run skeleton_apsp, with retries.
SampledSkeletonApsp sampled_skeleton_apsp(AlgoContext& ctx, double x);

// Extra-mark probability that lifts density n^(x-1) to n^(-1/3).
double densify_probability(std::size_t n, double x);
// Adds unmarked nodes independently with densify_probability; sorted output.
std::vector<NodeId> densify_marks(std::size_t n, double x, const std::vector<NodeId>& marks, std::uint64_t seed);

struct RsspResult {
  std::vector<NodeId> sources;  // the random source set, sorted
  SkeletonGraph skel;           // built on sources plus any densification
  DistanceTable skel_apsp;      // skeleton index x skeleton index
  DistanceTable dist;           // rows follow `sources`, columns are all nodes
  std::unique_ptr<CliqueRouter> router;
};
RsspResult rssp(AlgoContext& ctx, double x);

struct ReassignResult {
  std::vector<std::vector<std::uint32_t>> helpers;  // per node; skeleton indices, empty outside A
  std::uint64_t size_a = 0;
  std::uint32_t max_load = 0;  // most A-nodes served by one skeleton node
};
// Each skeleton node keeps every A-node within h hops with probability
// min(1, k/|A|). Throws AssignmentDeficit when some A-node gets nobody.
ReassignResult reassign_skeletons(AlgoContext& ctx, const SkeletonGraph& skel, const std::vector<bool>& in_a,
                                  double k);

struct MssResult {
  std::vector<NodeId> sources;
  DistanceTable dist;  // rows follow `sources`
  std::size_t sparse_sources = 0;
  std::size_t dense_sources = 0;
};
// Exact distances from up to about n^(1/3) given sources.
MssResult exact_n13_ssp(AlgoContext& ctx, std::vector<NodeId> sources);

// d <= estimate <= (1+eps) d on unweighted graphs, <= 3d on weighted ones.
MssResult approx_mssp(AlgoContext& ctx, std::vector<NodeId> sources, double epsilon);

// ecc/(1+eps) <= estimate <= ecc; unweighted graphs.
std::vector<double> ecc_unweighted(AlgoContext& ctx, double epsilon);
// ecc/3 <= estimate <= ecc.
std::vector<double> ecc_weighted(AlgoContext& ctx);
// D/(1+eps) <= estimate <= D.
double diameter_unweighted(AlgoContext& ctx, double epsilon);
// D/2 <= estimate <= D; one exact SSSP from node 0.
Weight diameter_weighted(AlgoContext& ctx);

}  // namespace hybrid
