// primitives.hpp - aggregate-and-broadcast and token dissemination
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hybrid/engine.hpp"

namespace hybrid {

using Combine = std::function<Word(Word, Word)>;

struct AggregateSpec {
  std::vector<Word> values;  // one per node
  Combine combine;           // associative and commutative
  Word identity = 0;
};

Word combine_sum(Word a, Word b);
Word combine_max(Word a, Word b);
Word combine_min(Word a, Word b);

struct AggregateResult {
  std::vector<Word> per_node;  // what each node holds at the end
  Word value = 0;
  std::uint64_t rounds = 0;
};

// Converge-cast then broadcast on the heap-ordered id tree (parent of i is
// (i-1)/2) over the global channel. About 2*log2(n) rounds, label "agg".
AggregateResult aggregate_and_broadcast(Network& net, const AggregateSpec& spec);

// Shorthands returning the common value.
Word aggregate_sum(Network& net, std::span<const Word> values);
Word aggregate_max(Network& net, std::span<const Word> values);
Word aggregate_min(Network& net, std::span<const Word> values);

struct Token {
  NodeId owner = 0;
  Word body = 0;
  auto operator<=>(const Token&) const = default;
};

struct TdParams {
  double td_const = 3.0;
  unsigned max_attempts = 3;
};

struct TdResult {
  std::vector<Token> tokens;  // the distinct tokens, sorted; known everywhere on success
  std::size_t k = 0;
  std::size_t ell = 0;
  unsigned attempts = 0;
  std::uint64_t budget = 0;             // spreading rounds per attempt
  std::vector<std::size_t> known_count;  // per node, after the final attempt
};

// Spreading budget: ceil(c*(sqrt(k ln n / gamma) + ell) + log2 n / log2(gamma+1)).
std::uint64_t td_round_budget(std::size_t n, unsigned gamma, std::size_t k, std::size_t ell, double c);

// initial[v] lists the tokens v starts with; tokens must be distinct. Each
// round every node shares its new tokens with its neighbors and pushes up to
// gamma random known tokens over the global channel. Slot j of node u targets
// pi_r[(u+j) mod n] for a permutation pi_r drawn from shared randomness, so no
// node ever receives more than gamma words. A completeness aggregate follows
// each attempt; incomplete attempts restart from scratch with a fresh seed.
// Spreading rounds are charged to "td". Throws RoundBudgetExceeded once
// max_attempts fail.
TdResult token_dissemination(Network& net, const std::vector<std::vector<Token>>& initial,
                             const TdParams& params = {});

// Tokens carry one word; these pack an id and a value into it.
Word pack_id_value(NodeId id, Weight value);
NodeId unpack_id(Word w);
Weight unpack_value(Word w);  // kInfinity survives the round trip

}  // namespace hybrid
