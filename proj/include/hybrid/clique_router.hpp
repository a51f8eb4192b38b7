// clique_router.hpp - LOCAL and congested-clique rounds simulated over a skeleton
//
// Clique routing uses helpers and relays. Every real node u helps one
// skeleton node chosen uniformly among the marks within h hops of it (a
// skeleton node helps itself and has rank 0). With c_i helpers for skeleton
// node i, the word for pair (i,j) travels
//   i --local--> helper (j mod c_i) of i --global--> relay (i*|M|+j) mod n
//     --global--> helper (i mod c_j) of j --local--> j.
// The two global stages use time slots from a greedy first-fit over all
// ordered pairs, so no node sends or receives more than gamma words in a
// slot. The schedule depends only on globally known data and is computed once.
// The local hand-over windows last r rounds, r being the largest hop distance
// from a helper to its skeleton node. Helpers learn their own distance during
// registration and r is agreed on with one aggregate, so r <= h.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hybrid/engine.hpp"
#include "hybrid/skeleton.hpp"

namespace hybrid {

struct LocalSimDelivery {
  std::uint32_t from = 0;  // skeleton index
  std::vector<Word> payload;
};

// One LOCAL round on the skeleton: every skeleton node receives the payload
// of each skeleton neighbor. Exactly h rounds under "local-sim". payloads is
// indexed by skeleton index; empty payloads are not sent.
std::vector<std::vector<LocalSimDelivery>> local_sim_round(Network& net, const SkeletonGraph& skel,
                                                           const std::vector<std::vector<Word>>& payloads,
                                                           const std::string& label = "local-sim");
// Charge-only form for callers that evaluate the delivery themselves.
void charge_local_sim(Network& net, const SkeletonGraph& skel, std::uint64_t words,
                      const std::string& label = "local-sim");

struct CliqueWord {
  std::uint32_t from = 0;  // skeleton indices
  std::uint32_t to = 0;
  Word word = 0;
};

class CliqueRouter {
 public:
  // Setup: helpers register (2h local rounds), r is aggregated, the pairs
  // (i, c_i) are disseminated as tokens, receiving helpers register at their relays.
  // All of it is charged under "cc-sim".
  CliqueRouter(Network& net, const SkeletonGraph& skel);

  std::size_t size() const { return k_; }
  std::uint64_t slots_a() const { return slots_a_; }
  std::uint64_t slots_b() const { return slots_b_; }
  const std::vector<std::uint32_t>& helper_counts() const { return count_; }
  std::uint64_t drops() const { return drops_; }
  unsigned window() const { return window_; }

  // One clique round: at most one word per ordered pair, else PayloadTooLarge.
  // Composite protocols pass their own ledger label.
  std::vector<CliqueWord> round(std::span<const CliqueWord> words, const std::string& label = "cc-sim");
  // Several words per pair: the b-th word of each pair rides in sub-round b;
  // all sub-rounds share one pair of local windows.
  std::vector<CliqueWord> batch(std::span<const CliqueWord> words, const std::string& label = "cc-sim");
  // Count-only traffic (mult is |M| x |M|). Returns the number of lost words.
  std::uint64_t route_counts(const std::vector<std::uint16_t>& mult, const std::string& label = "cc-sim");

 private:
  struct Item {
    std::uint32_t pair;
    std::uint32_t id;
  };
  NodeId sender_helper(std::uint32_t i, std::uint32_t j) const;
  NodeId receiver_helper(std::uint32_t i, std::uint32_t j) const;
  NodeId relay(std::uint32_t i, std::uint32_t j) const;
  // Runs both global stages for one sub-round; appends delivered item ids.
  void sub_round(const std::vector<Item>& items, std::vector<std::uint32_t>& delivered);
  void build_schedule();

  Network* net_;
  const SkeletonGraph* skel_;
  std::size_t k_ = 0;
  std::vector<std::uint32_t> count_;                // c_i
  std::vector<std::vector<NodeId>> helpers_;        // rank -> real id, per skeleton node
  std::vector<std::uint32_t> slot_a_, slot_b_;      // per pair i*k+j
  std::uint64_t slots_a_ = 0, slots_b_ = 0;
  std::uint64_t drops_ = 0;
  unsigned window_ = 0;
};

}  // namespace hybrid
