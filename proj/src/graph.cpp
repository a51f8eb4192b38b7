#include "hybrid/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hybrid/errors.hpp"

namespace hybrid {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MaxRoundsExceeded: return "MaxRoundsExceeded";
    case ErrorKind::IllegalLocalEdge: return "IllegalLocalEdge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorKind::RoundBudgetExceeded: return "RoundBudgetExceeded";
    case ErrorKind::AssignmentDeficit: return "AssignmentDeficit";
    case ErrorKind::RepresentativeMissing: return "RepresentativeMissing";
    case ErrorKind::SkeletonCoverage: return "SkeletonCoverage";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges, Weight max_weight)
    : edges_(std::move(edges)) {
  offsets_.assign(n + 1, 0);
  for (auto& e : edges_) {
    if (e.u >= n || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop");
    if (e.w == 0 || e.w == kInfinity) throw std::invalid_argument("weight must be positive and finite");
    if (e.w > max_weight) throw std::invalid_argument("weight exceeds configured W");
    if (e.u > e.v) std::swap(e.u, e.v);
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
    max_w_ = std::max(max_w_, e.w);
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  arcs_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    arcs_[fill[e.u]++] = {e.v, e.w};
    arcs_[fill[e.v]++] = {e.u, e.w};
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto b = arcs_.begin() + offsets_[u], en = arcs_.begin() + offsets_[u + 1];
    std::sort(b, en, [](const Arc& a, const Arc& c) { return a.to < c.to; });
    if (std::adjacent_find(b, en, [](const Arc& a, const Arc& c) { return a.to == c.to; }) != en)
      throw std::invalid_argument("duplicate edge");
  }
}

std::size_t WeightedGraph::max_degree() const {
  std::size_t d = 0;
  for (std::size_t u = 0; u < n(); ++u) d = std::max(d, degree(static_cast<NodeId>(u)));
  return d;
}

std::optional<Weight> WeightedGraph::edge_weight(NodeId u, NodeId v) const {
  if (u >= n() || v >= n()) return std::nullopt;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v,
                             [](const Arc& a, NodeId x) { return a.to < x; });
  if (it == nb.end() || it->to != v) return std::nullopt;
  return it->w;
}

Weight default_max_weight(std::size_t n) {
  Weight nn = std::max<Weight>(n, 2);
  return nn * nn;
}

WeightedGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + msg);
  };
  if (!next(line)) fail("missing header");
  std::istringstream hs(line);
  std::size_t n = 0, m = 0;
  if (!(hs >> n >> m)) fail("expected 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!next(line)) fail("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    std::istringstream es(line);
    std::uint64_t u, v, w;
    if (!(es >> u >> v >> w)) fail("expected 'u v w'");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
  }
  try {
    return WeightedGraph(n, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  return read_graph(in);
}

void save_graph(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_graph(out, g);
}

std::string weight_to_string(Weight w) {
  return w == kInfinity ? std::string("inf") : std::to_string(w);
}

}  // namespace hybrid
