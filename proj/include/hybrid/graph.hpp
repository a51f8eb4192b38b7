// graph.hpp - immutable weighted undirected graph and distance containers
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hybrid {

using NodeId = std::uint32_t;
using Weight = std::uint64_t;

inline constexpr Weight kInfinity = std::numeric_limits<Weight>::max();

// Saturating add so that anything plus infinity stays infinity.
inline Weight add_weights(Weight a, Weight b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  Weight s = a + b;
  return s < a ? kInfinity : s;
}

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  Weight w = 1;
  bool operator==(const Edge&) const = default;
};

struct Arc {
  NodeId to = 0;
  Weight w = 1;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Edges are undirected and listed once. Throws std::invalid_argument on
  // out-of-range ids, self-loops, zero weights, duplicates or w > max_weight.
  WeightedGraph(std::size_t n, std::vector<Edge> edges,
                Weight max_weight = kInfinity);

  std::size_t n() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t m() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const Arc> neighbors(NodeId u) const {
    return {arcs_.data() + offsets_[u], arcs_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  std::size_t max_degree() const;

  // Weight of edge (u,v), or nullopt when absent. O(log deg(u)).
  std::optional<Weight> edge_weight(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return edge_weight(u, v).has_value(); }

  Weight max_edge_weight() const { return max_w_; }
  bool unweighted() const { return max_w_ <= 1; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;  // sorted by target within each node
  Weight max_w_ = 0;
};

// Default weight cap W = n^2.
Weight default_max_weight(std::size_t n);

struct DistanceVector {
  NodeId source = 0;
  std::vector<Weight> dist;
  std::optional<unsigned> hop_limit;  // nullopt = unbounded

  Weight operator[](NodeId v) const { return dist[v]; }
  std::size_t size() const { return dist.size(); }
};

// Row-major table: rows are sources (or skeleton members), columns are nodes.
class DistanceTable {
 public:
  DistanceTable() = default;
  DistanceTable(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, kInfinity) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Weight& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Weight at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<Weight> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Weight> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Weight> data_;
};

// Text format: "n m" then m lines "u v w".
WeightedGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const WeightedGraph& g);
WeightedGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const WeightedGraph& g);

std::string weight_to_string(Weight w);

}  // namespace hybrid
