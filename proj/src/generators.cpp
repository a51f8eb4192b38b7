#include "hybrid/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "hybrid/errors.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

namespace {

using EdgeList = std::vector<Edge>;

void er_edges(EdgeList& out, NodeId base, std::size_t n, double p, Rng& rng) {
  if (p <= 0.0 || n < 2) return;
  if (p >= 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId u = 0; u < v; ++u) out.push_back({base + u, base + v, 1});
    return;
  }
  // Geometric skipping over the pair sequence (0,1),(0,2),(1,2),(0,3),...
  const double lq = std::log1p(-p);
  std::int64_t v = 1, w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    double r = uniform01(rng);
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / lq));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) out.push_back({base + static_cast<NodeId>(w), base + static_cast<NodeId>(v), 1});
  }
}

void rgg_edges(EdgeList& out, std::size_t n, double r, Rng& rng) {
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = uniform01(rng);
    ys[i] = uniform01(rng);
  }
  const std::size_t cells = std::max<std::size_t>(1, static_cast<std::size_t>(1.0 / std::max(r, 1e-9)));
  const std::size_t side = std::min<std::size_t>(cells, 4096);
  std::vector<std::vector<NodeId>> grid(side * side);
  auto cell = [&](double c) { return std::min(side - 1, static_cast<std::size_t>(c * side)); };
  for (NodeId i = 0; i < n; ++i) grid[cell(xs[i]) * side + cell(ys[i])].push_back(i);
  const double r2 = r * r;
  for (NodeId i = 0; i < n; ++i) {
    std::size_t cx = cell(xs[i]), cy = cell(ys[i]);
    std::vector<NodeId> near;
    for (std::size_t gx = cx ? cx - 1 : 0; gx <= std::min(side - 1, cx + 1); ++gx)
      for (std::size_t gy = cy ? cy - 1 : 0; gy <= std::min(side - 1, cy + 1); ++gy)
        for (NodeId j : grid[gx * side + gy])
          if (j > i) near.push_back(j);
    std::sort(near.begin(), near.end());
    for (NodeId j : near) {
      double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      if (dx * dx + dy * dy <= r2) out.push_back({i, j, 1});
    }
  }
}

void grid_edges(EdgeList& out, std::size_t n) {
  std::size_t rows = 1;
  for (std::size_t d = 1; d * d <= n; ++d)
    if (n % d == 0) rows = d;
  std::size_t cols = n / rows;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      auto id = static_cast<NodeId>(r * cols + c);
      if (c + 1 < cols) out.push_back({id, id + 1, 1});
      if (r + 1 < rows) out.push_back({id, static_cast<NodeId>(id + cols), 1});
    }
}

void path_edges(EdgeList& out, NodeId from, std::size_t count) {
  for (std::size_t i = 0; i + 1 < count; ++i)
    out.push_back({static_cast<NodeId>(from + i), static_cast<NodeId>(from + i + 1), 1});
}

WeightedGraph sample_once(const GraphSpec& s, std::uint64_t seed) {
  Rng rng(seed);
  EdgeList edges;
  switch (s.model) {
    case GraphModel::ErdosRenyi: er_edges(edges, 0, s.n, s.param, rng); break;
    case GraphModel::RandomGeometric: rgg_edges(edges, s.n, s.param, rng); break;
    case GraphModel::Grid: grid_edges(edges, s.n); break;
    case GraphModel::Path: path_edges(edges, 0, s.n); break;
    case GraphModel::Complete: er_edges(edges, 0, s.n, 1.0, rng); break;
    case GraphModel::Star:
      for (NodeId v = 1; v < s.n; ++v) edges.push_back({0, v, 1});
      break;
    case GraphModel::Lollipop: {
      std::size_t core = s.n - s.tail;
      er_edges(edges, 0, core, s.param, rng);
      if (s.tail > 0) {
        edges.push_back({static_cast<NodeId>(core - 1), static_cast<NodeId>(core), 1});
        path_edges(edges, static_cast<NodeId>(core), s.tail);
      }
      break;
    }
  }
  if (s.wmax > 1 || s.wmin > 1) {
    const Weight span = s.wmax - s.wmin + 1;
    for (auto& e : edges) e.w = s.wmin + uniform_below(rng, span);
  }
  return WeightedGraph(s.n, std::move(edges));
}

void validate(const GraphSpec& s) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (s.n == 0) bad("graph needs n >= 1");
  if (s.wmin == 0 || s.wmin > s.wmax) bad("weight range must satisfy 1 <= wmin <= wmax");
  if (s.wmax > default_max_weight(s.n) && s.wmax > 1) bad("wmax exceeds W = n^2");
  if (s.model == GraphModel::ErdosRenyi && (s.param < 0 || s.param > 1)) bad("p must be in [0,1]");
  if (s.model == GraphModel::RandomGeometric && s.param <= 0) bad("radius must be positive");
  if (s.model == GraphModel::Lollipop && s.tail >= s.n) bad("tail must leave a core");
}

}  // namespace

WeightedGraph gen_random_graph(const GraphSpec& spec) {
  validate(spec);
  for (unsigned attempt = 0; attempt < kGeneratorRetries; ++attempt) {
    auto g = sample_once(spec, derive_seed(spec.seed, attempt));
    if (is_connected(g)) return g;
  }
  throw Error(ErrorKind::Disconnected, "no connected sample for " + format_graph_spec(spec));
}

namespace {
const std::map<std::string, GraphModel>& model_names() {
  static const std::map<std::string, GraphModel> m{
      {"er", GraphModel::ErdosRenyi},     {"rgg", GraphModel::RandomGeometric},
      {"grid", GraphModel::Grid},         {"path", GraphModel::Path},
      {"lollipop", GraphModel::Lollipop}, {"complete", GraphModel::Complete},
      {"star", GraphModel::Star}};
  return m;
}
}  // namespace

GraphSpec parse_graph_spec(const std::string& text) {
  auto fail = [&](const std::string& m) {
    throw Error(ErrorKind::Parse, "graph spec '" + text + "': " + m);
  };
  GraphSpec s;
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  auto it = model_names().find(kind);
  if (it == model_names().end()) fail("unknown model '" + kind + "'");
  s.model = it->second;
  if (colon == std::string::npos) fail("missing parameters");
  std::stringstream rest(text.substr(colon + 1));
  std::string kv;
  bool have_n = false;
  while (std::getline(rest, kv, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) fail("expected key=value in '" + kv + "'");
    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    try {
      if (k == "n") {
        s.n = std::stoull(v);
        have_n = true;
      } else if (k == "p" || k == "r") {
        s.param = std::stod(v);
      } else if (k == "tail") {
        s.tail = std::stoull(v);
      } else if (k == "wmin") {
        s.wmin = std::stoull(v);
      } else if (k == "wmax") {
        s.wmax = std::stoull(v);
      } else if (k == "seed") {
        s.seed = std::stoull(v);
      } else {
        fail("unknown key '" + k + "'");
      }
    } catch (const std::logic_error&) {
      fail("bad value for '" + k + "'");
    }
  }
  if (!have_n) fail("missing n");
  if (s.wmax < s.wmin) s.wmax = s.wmin;
  return s;
}

std::string format_graph_spec(const GraphSpec& s) {
  std::string kind;
  for (const auto& [name, m] : model_names())
    if (m == s.model) kind = name;
  std::ostringstream o;
  o << kind << ":n=" << s.n;
  if (s.model == GraphModel::ErdosRenyi || s.model == GraphModel::Lollipop) o << ",p=" << s.param;
  if (s.model == GraphModel::RandomGeometric) o << ",r=" << s.param;
  if (s.model == GraphModel::Lollipop) o << ",tail=" << s.tail;
  o << ",wmin=" << s.wmin << ",wmax=" << s.wmax << ",seed=" << s.seed;
  return o.str();
}

const char* role_name(LowerBoundRole r) {
  switch (r) {
    case LowerBoundRole::A: return "a";
    case LowerBoundRole::B: return "b";
    case LowerBoundRole::C: return "c";
    case LowerBoundRole::SB: return "S_b";
    case LowerBoundRole::SC: return "S_c";
    case LowerBoundRole::PathNode: return "pathNode";
  }
  return "?";
}

LowerBoundInstance gen_lower_bound_graph(std::size_t n, double p, std::uint64_t seed) {
  LowerBoundInstance inst;
  if (n < 4 || p <= 0.0 || p > 1.0)
    throw Error(ErrorKind::InvalidArgument, "lower-bound graph needs n >= 4 and 0 < p <= 1");
  inst.y = n / 4;
  inst.L = static_cast<std::size_t>(std::floor(std::sqrt(p * n) / std::log2(static_cast<double>(n))));
  inst.x = n - 2 * inst.y - 1;
  if (inst.L < 1) throw Error(ErrorKind::InvalidArgument, "infeasible (n,p): L < 1");
  if (inst.L >= inst.x) throw Error(ErrorKind::InvalidArgument, "infeasible (n,p): b must precede c");

  const std::size_t y = inst.y;
  // Star leaves take the reserved ids. Each id below y goes to the next
  // unlabeled S_b slot or S_c slot with probability 1/2; the other reserved
  // ids fill whatever slots remain, S_b first.
  Rng rng(derive_seed(seed, 0x1b));
  std::vector<NodeId> sb, sc;
  for (NodeId id = 0; id < y; ++id) {
    bool to_b = bernoulli(rng, 0.5);
    if (to_b && sb.size() == y) to_b = false;
    if (!to_b && sc.size() == y) to_b = true;
    (to_b ? sb : sc).push_back(id);
  }
  for (NodeId id = static_cast<NodeId>(y); id < 2 * y; ++id) (sb.size() < y ? sb : sc).push_back(id);

  inst.roles.assign(n, LowerBoundRole::PathNode);
  const auto first = static_cast<NodeId>(2 * y);
  inst.a = first;
  inst.b = static_cast<NodeId>(first + inst.L);
  inst.c = static_cast<NodeId>(first + inst.x);
  std::vector<Edge> edges;
  path_edges(edges, first, inst.x + 1);
  for (NodeId u : sb) {
    edges.push_back({u, inst.b, 1});
    inst.roles[u] = LowerBoundRole::SB;
  }
  for (NodeId u : sc) {
    edges.push_back({u, inst.c, 1});
    inst.roles[u] = LowerBoundRole::SC;
  }
  inst.roles[inst.a] = LowerBoundRole::A;
  inst.roles[inst.b] = LowerBoundRole::B;
  inst.roles[inst.c] = LowerBoundRole::C;
  inst.graph = WeightedGraph(n, std::move(edges));
  return inst;
}

void write_roles(std::ostream& out, const LowerBoundInstance& inst) {
  for (NodeId v = 0; v < inst.roles.size(); ++v) out << v << ' ' << role_name(inst.roles[v]) << '\n';
}

}  // namespace hybrid
