#include "hybrid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "hybrid/distance_algos.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/generators.hpp"
#include "hybrid/oracle_models.hpp"
#include "hybrid/oracles.hpp"
#include "hybrid/primitives.hpp"
#include "hybrid/rng.hpp"
#include "hybrid/skeleton.hpp"

namespace hybrid {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kInfD = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return d;
}

std::uint64_t to_u64(const std::string& v) {
  if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
  std::size_t used = 0;
  auto x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(v);
}

// "1,2,5-8"
std::vector<std::uint64_t> to_seed_list(const std::string& v) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(v, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_u64(part));
      continue;
    }
    const auto lo = to_u64(trim(part.substr(0, dash))), hi = to_u64(trim(part.substr(dash + 1)));
    if (hi < lo) throw std::invalid_argument(part);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream o;
  o << std::setprecision(10) << x;
  return o.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

// ---- graphs ----------------------------------------------------------------

struct BuiltGraph {
  WeightedGraph g;
  std::string spec;
  std::optional<LowerBoundInstance> lb;
  double lb_p = 0.0;
};

BuiltGraph build_graph(const Scenario& s, const std::string& text, std::size_t size, std::uint64_t seed) {
  const bool size_is_n = size > 0 && s.sweep_over == "n";
  BuiltGraph out;
  if (text.rfind("file:", 0) == 0) {
    out.g = load_graph(text.substr(5));
    out.spec = text;
    return out;
  }
  if (text.rfind("lowerbound:", 0) == 0) {
    std::size_t n = 0;
    double p = 0.0;
    for (const auto& kv : split(text.substr(11), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::Parse, "graph spec '" + text + "': expected key=value");
      const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
      if (k == "n") {
        n = to_u64(v);
      } else if (k == "p") {
        p = to_double(v);
      } else if (k != "seed") {
        throw Error(ErrorKind::Parse, "graph spec '" + text + "': unknown key '" + k + "'");
      }
    }
    if (size_is_n) n = size;
    out.lb = gen_lower_bound_graph(n, p, seed);
    out.lb_p = p;
    out.g = out.lb->graph;
    std::ostringstream o;
    o << "lowerbound:n=" << n << ",p=" << p << ",seed=" << seed;
    out.spec = o.str();
    return out;
  }
  GraphSpec gs = parse_graph_spec(text);
  if (size_is_n) gs.n = size;
  gs.seed = seed;
  if (s.density && gs.model == GraphModel::ErdosRenyi)
    gs.param = std::min(1.0, *s.density * std::log(static_cast<double>(gs.n)) / static_cast<double>(gs.n));
  if (s.tail_frac && gs.model == GraphModel::Lollipop)
    gs.tail = static_cast<std::size_t>(std::floor(*s.tail_frac * static_cast<double>(gs.n)));
  out.g = gen_random_graph(gs);
  out.spec = format_graph_spec(gs);
  return out;
}

// ---- verification helpers ----------------------------------------------------

void compare_exact(std::span<const Weight> truth, std::span<const Weight> got, SeedRun& r) {
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == got[i]) continue;
    ++r.violations;
    double err = (truth[i] == kInfinity || got[i] == kInfinity)
                     ? kInfD
                     : std::abs(static_cast<double>(truth[i]) - static_cast<double>(got[i]));
    r.max_error = std::max(r.max_error, err);
  }
}

// Checks lo * truth <= got <= hi * truth; max_error is the largest relative gap.
void compare_envelope(double truth, double got, double lo, double hi, SeedRun& r) {
  constexpr double tol = 1e-9;
  if (truth == 0.0) {
    if (got != 0.0) {
      ++r.violations;
      r.max_error = kInfD;
    }
    return;
  }
  if (got < lo * truth - tol || got > hi * truth + tol) ++r.violations;
  r.max_error = std::max(r.max_error, std::abs(got - truth) / truth);
}

std::vector<NodeId> pick_nodes(std::size_t n, std::size_t q, const std::string& mode, Rng& rng) {
  q = std::min(q, n);
  std::vector<NodeId> out;
  if (q == 0) return out;
  if (mode == "spread") {
    for (std::size_t i = 0; i < q; ++i)
      out.push_back(static_cast<NodeId>(q == 1 ? 0 : i * (n - 1) / (q - 1)));
  } else {
    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), 0);
    portable_shuffle(all.begin(), all.end(), rng);
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(q));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t ceil_pow(std::size_t n, double e) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), e) - 1e-9));
}

std::vector<std::vector<Word>> incident_ids(const WeightedGraph& g) {
  std::vector<std::vector<Word>> out(g.n());
  for (NodeId v = 0; v < g.n(); ++v)
    for (const Arc& a : g.neighbors(v)) out[v].push_back(a.to);
  return out;
}

// ---- algorithms ------------------------------------------------------------

struct RunEnv {
  const Scenario& s;
  const BuiltGraph& bg;
  Network& net;
  AlgoContext& ctx;
  Rng& rng;
  SeedRun& r;
  std::optional<std::uint64_t> model_rounds;

  const WeightedGraph& g() const { return bg.g; }
  std::size_t n() const { return bg.g.n(); }
};

NodeId single_source(RunEnv& e) {
  if (e.s.source) {
    if (*e.s.source >= e.n()) throw Error(ErrorKind::InvalidArgument, "source id out of range");
    return *e.s.source;
  }
  return static_cast<NodeId>(uniform_below(e.rng, e.n()));
}

SkeletonGraph plain_skeleton(RunEnv& e, double x) {
  auto marks = sample_marks(e.n(), x, e.net.next_seed());
  return build_skeleton(e.net, std::move(marks), x, skeleton_hop_radius(e.n(), x, e.s.h_const));
}

void algo_exact_sssp(RunEnv& e) {
  const NodeId src = single_source(e);
  e.r.extra["source"] = src;
  auto d = hybrid_exact_sssp(e.ctx, src);
  if (e.s.verify) compare_exact(dijkstra(e.g(), src).dist, d.dist, e.r);
}

void algo_tiered_apsp(RunEnv& e) {
  AbstractCliqueBackend b(e.g());
  auto t = tiered_apsp(b);
  e.model_rounds = b.cost.tiered_rounds + b.cost.clique_rounds;
  e.r.extra["tiered_rounds"] = static_cast<double>(b.cost.tiered_rounds);
  e.r.extra["clique_rounds"] = static_cast<double>(b.cost.clique_rounds);
  if (!e.s.verify) return;
  auto truth = brute_apsp(e.g());
  for (NodeId v = 0; v < e.n(); ++v) compare_exact(truth.row(v), t.row(v), e.r);
  const auto cap = 2 * static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(e.n(), 2)))));
  if (b.cost.tiered_rounds != 1) ++e.r.violations;
  if (b.cost.clique_rounds > cap) ++e.r.violations;
}

void algo_skeleton_apsp(RunEnv& e) {
  auto res = sampled_skeleton_apsp(e.ctx, e.s.x);
  if (!e.s.verify) return;
  const auto& mem = res.skel.members;
  std::vector<Weight> want(mem.size());
  for (std::size_t i = 0; i < mem.size(); ++i) {
    auto d = dijkstra(e.g(), mem[i]).dist;
    for (std::size_t j = 0; j < mem.size(); ++j) want[j] = d[mem[j]];
    compare_exact(want, res.apsp.row(i), e.r);
  }
}

void algo_rssp(RunEnv& e) {
  auto res = rssp(e.ctx, e.s.x);
  e.r.extra["sources"] = static_cast<double>(res.sources.size());
  e.r.extra["marks"] = static_cast<double>(res.skel.size());
  if (!e.s.verify) return;
  for (std::size_t i = 0; i < res.sources.size(); ++i)
    compare_exact(dijkstra(e.g(), res.sources[i]).dist, res.dist.row(i), e.r);
}

void algo_densify(RunEnv& e) {
  const std::size_t n = e.n();
  auto marks = sample_marks(n, e.s.x, e.net.next_seed());
  auto dense = densify_marks(n, e.s.x, marks, e.net.next_seed());
  const double rate = e.s.x < kTwoThirds ? std::pow(static_cast<double>(n), -1.0 / 3.0) : mark_probability(n, e.s.x);
  e.r.extra["sources"] = static_cast<double>(marks.size());
  e.r.extra["marks"] = static_cast<double>(dense.size());
  e.r.extra["expected"] = rate * static_cast<double>(n);
  e.r.extra["variance"] = rate * (1 - rate) * static_cast<double>(n);
  if (e.s.verify && !std::includes(dense.begin(), dense.end(), marks.begin(), marks.end())) ++e.r.violations;
}

void algo_reassign(RunEnv& e) {
  auto skel = plain_skeleton(e, e.s.x);
  const std::size_t q = e.s.sources ? e.s.sources : ceil_pow(e.n(), 1.0 / 3.0);
  std::vector<bool> in_a(e.n(), false);
  for (NodeId a : pick_nodes(e.n(), q, e.s.source_mode, e.rng)) in_a[a] = true;
  auto res = reassign_skeletons(e.ctx, skel, in_a, e.s.reassign_k);
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  for (NodeId v = 0; v < e.n(); ++v)
    if (in_a[v]) fewest = std::min(fewest, res.helpers[v].size());
  e.r.extra["size_a"] = static_cast<double>(res.size_a);
  e.r.extra["max_load"] = res.max_load;
  e.r.extra["min_helpers"] = static_cast<double>(fewest);
  if (e.s.verify && res.max_load > 3 * std::log(static_cast<double>(e.n()))) ++e.r.violations;
}

void algo_exact_n13(RunEnv& e) {
  const std::size_t q = e.s.sources ? e.s.sources : ceil_pow(e.n(), 1.0 / 3.0);
  auto res = exact_n13_ssp(e.ctx, pick_nodes(e.n(), q, e.s.source_mode, e.rng));
  e.r.extra["sources"] = static_cast<double>(res.sources.size());
  e.r.extra["sparse_sources"] = static_cast<double>(res.sparse_sources);
  e.r.extra["dense_sources"] = static_cast<double>(res.dense_sources);
  if (!e.s.verify) return;
  for (std::size_t i = 0; i < res.sources.size(); ++i)
    compare_exact(dijkstra(e.g(), res.sources[i]).dist, res.dist.row(i), e.r);
}

void check_mssp(RunEnv& e, const MssResult& res) {
  const double alpha = e.g().unweighted() ? 1.0 + e.s.epsilon : 3.0;
  e.r.extra["sources"] = static_cast<double>(res.sources.size());
  e.r.extra["alpha"] = alpha;
  if (!e.s.verify) return;
  for (std::size_t i = 0; i < res.sources.size(); ++i) {
    auto truth = dijkstra(e.g(), res.sources[i]).dist;
    for (NodeId v = 0; v < e.n(); ++v)
      compare_envelope(static_cast<double>(truth[v]), static_cast<double>(res.dist.at(i, v)), 1.0, alpha, e.r);
  }
}

void algo_approx_mssp(RunEnv& e) {
  const std::size_t q = e.s.sources ? e.s.sources : ceil_pow(e.n(), e.s.y);
  check_mssp(e, approx_mssp(e.ctx, pick_nodes(e.n(), q, e.s.source_mode, e.rng), e.s.epsilon));
}

void check_ecc(RunEnv& e, const std::vector<double>& est, double lo) {
  if (!e.s.verify) return;
  auto truth = brute_eccentricities(e.g());
  for (NodeId v = 0; v < e.n(); ++v) compare_envelope(static_cast<double>(truth[v]), est[v], lo, 1.0, e.r);
}

void algo_ecc_unweighted(RunEnv& e) { check_ecc(e, ecc_unweighted(e.ctx, e.s.epsilon), 1.0 / (1.0 + e.s.epsilon)); }
void algo_ecc_weighted(RunEnv& e) { check_ecc(e, ecc_weighted(e.ctx), 1.0 / 3.0); }

void check_diameter(RunEnv& e, double est, double lo) {
  e.r.extra["estimate"] = est;
  if (!e.s.verify) return;
  auto ecc = brute_eccentricities(e.g());
  const double d = static_cast<double>(*std::max_element(ecc.begin(), ecc.end()));
  e.r.extra["diameter"] = d;
  compare_envelope(d, est, lo, 1.0, e.r);
}

void algo_diameter_unweighted(RunEnv& e) {
  check_diameter(e, diameter_unweighted(e.ctx, e.s.epsilon), 1.0 / (1.0 + e.s.epsilon));
}
void algo_diameter_weighted(RunEnv& e) {
  check_diameter(e, static_cast<double>(diameter_weighted(e.ctx)), 0.5);
}

void algo_token_dissemination(RunEnv& e) {
  const std::size_t n = e.n();
  std::size_t k = e.s.sweep_over == "tokens" && e.r.size > 0 ? e.r.size : (e.s.tokens ? e.s.tokens : n);
  if (k > n) throw Error(ErrorKind::InvalidArgument, "at most one token per node");
  std::vector<std::vector<Token>> init(n);
  auto holders = pick_nodes(n, k, "random", e.rng);
  for (std::size_t t = 0; t < holders.size(); ++t) init[holders[t]].push_back({holders[t], t});
  auto res = token_dissemination(e.net, init, {e.s.td_const, e.ctx.params.td.max_attempts});
  e.r.extra["tokens"] = static_cast<double>(res.k);
  e.r.extra["attempts"] = res.attempts;
  if (!e.s.verify) return;
  if (res.tokens.size() != k) ++e.r.violations;
  for (auto c : res.known_count) e.r.violations += c != res.k;
}

void algo_aggregate(RunEnv& e) {
  std::vector<Word> vals(e.n());
  for (auto& v : vals) v = uniform_below(e.rng, 1000);
  const Word got = aggregate_sum(e.net, vals);
  if (e.s.verify && got != std::accumulate(vals.begin(), vals.end(), Word{0})) ++e.r.violations;
}

void algo_skeleton_props(RunEnv& e) {
  auto skel = plain_skeleton(e, e.s.x);
  e.r.skeleton_size = skel.size();
  e.r.hop_radius = skel.h;
  auto rep = verify_properties(e.g(), skel);
  e.r.extra["connected"] = rep.connected;
  e.r.extra["distance_preserving"] = rep.distance_preserving;
  e.r.extra["coverage"] = rep.coverage;
  e.r.extra["size_ok"] = rep.size_ok;
  e.r.extra["all"] = rep.all();
  if (e.s.verify && !rep.all()) ++e.r.violations;
}

void algo_oracle_sim(RunEnv& e) {
  auto skel = plain_skeleton(e, e.s.x);
  e.r.skeleton_size = skel.size();
  e.r.hop_radius = skel.h;
  if (skel.size() == 0) throw Error(ErrorKind::SkeletonCoverage, "empty skeleton");
  CliqueRouter router(e.net, skel);
  OracleSimulator sim(e.net, skel, router);
  OracleRoundSpec up{OracleDirection::ToOracle, incident_ids(skel.overlay)};
  OracleRoundSpec down{OracleDirection::FromOracle, std::vector<std::vector<Word>>(skel.size())};
  for (NodeId v = 0; v < skel.size(); ++v)
    for (std::size_t t = 0; t < skel.overlay.degree(v); ++t) down.outbox[v].push_back(pack_id_value(v, t));
  const bool up_ok = sim.run(up) == oracle_model_round(skel.overlay, up);
  const bool down_ok = sim.run(down) == oracle_model_round(skel.overlay, down);
  e.r.extra["match"] = up_ok && down_ok;
  if (e.s.verify) e.r.violations += !up_ok + !down_ok;
}

void algo_tiered_sim(RunEnv& e) {
  auto skel = plain_skeleton(e, e.s.x);
  e.r.skeleton_size = skel.size();
  e.r.hop_radius = skel.h;
  CliqueRouter router(e.net, skel);
  TieredSimulator sim(e.net, skel, router, {e.s.sampler_const, 1});
  TieredRoundSpec spec{incident_ids(skel.overlay)};
  auto a = sim.run_once(spec);
  auto abstract = tiered_model_round(skel.overlay, spec);
  bool superset = true;
  for (NodeId u = 0; u < skel.size(); ++u) {
    const auto& got = a.delivery.received_from[u];
    const auto& want = abstract.received_from[u];
    superset = superset && std::includes(got.begin(), got.end(), want.begin(), want.end());
  }
  e.r.extra["match"] = superset;
  e.r.extra["contract_ok"] = a.contract_ok;
  e.r.extra["copies"] = static_cast<double>(a.copies);
  // The network's own verdict must agree with the centralized check.
  if (e.s.verify && superset != a.contract_ok) ++e.r.violations;
}

void algo_lower_bound(RunEnv& e) {
  if (!e.bg.lb) throw Error(ErrorKind::InvalidArgument, "lower-bound needs a lowerbound: graph");
  const auto& lb = *e.bg.lb;
  e.r.extra["L"] = static_cast<double>(lb.L);
  e.r.extra["x"] = static_cast<double>(lb.x);
  e.r.extra["y"] = static_cast<double>(lb.y);
  if (e.s.verify) {
    auto hops = hop_distances(e.g(), lb.a);
    for (NodeId u = 0; u < e.n(); ++u) {
      if (lb.roles[u] == LowerBoundRole::SB && hops[u] != lb.L + 1) ++e.r.violations;
      if (lb.roles[u] == LowerBoundRole::SC && hops[u] != lb.x + 1) ++e.r.violations;
    }
  }
  // Sources sampled with the instance's rate p, restricted to the star leaves.
  std::vector<NodeId> sources;
  for (NodeId v = 0; v < 2 * lb.y; ++v)
    if (bernoulli(e.rng, e.bg.lb_p)) sources.push_back(v);
  if (sources.empty()) sources.push_back(0);
  check_mssp(e, approx_mssp(e.ctx, sources, e.s.epsilon));
}

using AlgoFn = std::function<void(RunEnv&)>;

const std::map<std::string, AlgoFn>& algorithms() {
  static const std::map<std::string, AlgoFn> m = {
      {"exact-sssp", algo_exact_sssp},
      {"tiered-apsp", algo_tiered_apsp},
      {"skeleton-apsp", algo_skeleton_apsp},
      {"rssp", algo_rssp},
      {"densify", algo_densify},
      {"reassign", algo_reassign},
      {"exact-n13", algo_exact_n13},
      {"approx-mssp", algo_approx_mssp},
      {"ecc-unweighted", algo_ecc_unweighted},
      {"ecc-weighted", algo_ecc_weighted},
      {"diameter-unweighted", algo_diameter_unweighted},
      {"diameter-weighted", algo_diameter_weighted},
      {"token-dissemination", algo_token_dissemination},
      {"aggregate", algo_aggregate},
      {"skeleton-props", algo_skeleton_props},
      {"oracle-sim", algo_oracle_sim},
      {"tiered-sim", algo_tiered_sim},
      {"lower-bound", algo_lower_bound},
  };
  return m;
}

AlgoParams params_of(const Scenario& s) {
  AlgoParams p;
  p.h_const = s.h_const;
  p.sampler_const = s.sampler_const;
  p.theta = s.theta;
  p.reassign_k = s.reassign_k;
  p.td.td_const = s.td_const;
  p.max_retries = s.max_retries;
  return p;
}

void execute(const Scenario& s, const RunOptions& opts, SeedRun& r) {
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<BuiltGraph> bg;
  std::unique_ptr<Network> net;
  std::ofstream transcript;
  std::optional<AlgoContext> ctx;
  try {
    bg = std::make_unique<BuiltGraph>(build_graph(s, s.graphs[r.graph_index], r.size, r.seed));
    r.graph = bg->spec;
    r.n = bg->g.n();
    r.m = bg->g.m();
    HybridConfig cfg;
    cfg.seed = derive_seed(r.seed, 0x6e6574);
    cfg.gamma_const = s.gamma_const;
    net = std::make_unique<Network>(bg->g, cfg);
    if (!opts.transcript_dir.empty()) {
      transcript.open(std::filesystem::path(opts.transcript_dir) / ("transcript-" + std::to_string(r.index) + ".txt"));
      net->set_transcript(&transcript);
    }
    ctx.emplace(AlgoContext{*net, params_of(s)});
    Rng rng(derive_seed(r.seed, 0x736f75));
    RunEnv env{s, *bg, *net, *ctx, rng, r, std::nullopt};
    algorithms().at(s.algorithm)(env);
    if (env.model_rounds) r.extra["model_rounds"] = static_cast<double>(*env.model_rounds);
  } catch (const std::exception& e) {
    r.status = e.what();
  }
  if (net) {
    const auto& led = net->ledger();
    r.rounds = r.extra.count("model_rounds") ? static_cast<std::uint64_t>(r.extra["model_rounds"]) : led.total_rounds();
    r.drops = led.grand_total().drops;
    r.gamma = net->gamma();
    r.max_send = led.max_send_load();
    r.max_recv = led.max_recv_load();
    for (std::size_t i = 0; i < led.phase_names().size(); ++i) {
      const auto& t = led.phase_totals()[i];
      if (t.rounds || t.local_msgs || t.global_msgs || t.drops) r.phases.push_back({led.phase_names()[i], t});
    }
    net->set_transcript(nullptr);
  }
  if (ctx) {
    r.retries = ctx->retries;
    r.tiered_retries = ctx->tiered_retries;
    if (ctx->skeleton_size) r.skeleton_size = ctx->skeleton_size;
    if (ctx->hop_radius) r.hop_radius = ctx->hop_radius;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

double metric_of(const Scenario& s, const SeedRun& r) {
  if (s.sweep_metric == "total") return static_cast<double>(r.rounds);
  for (const auto& p : r.phases)
    if (p.phase == s.sweep_metric) return static_cast<double>(p.totals.rounds);
  return 0.0;
}

}  // namespace

// ---- scenario parsing ------------------------------------------------------

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : algorithms()) v.push_back(k);
    return v;
  }();
  return names;
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  Scenario s;
  std::size_t lineno = 0, algo_line = 0;
  auto fail = [&](std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) + ": " + msg);
  };
  bool have_seeds = false;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (val.empty()) fail(lineno, "empty value for '" + key + "'");
    try {
      if (key == "name") {
        s.name = val;
      } else if (key == "algorithm") {
        s.algorithm = val;
        algo_line = lineno;
      } else if (key == "graph") {
        for (auto& gspec : split(val, ';')) s.graphs.push_back(gspec);
      } else if (key == "sizes") {
        s.sizes.clear();
        for (auto& v : split(val, ',')) s.sizes.push_back(to_u64(v));
      } else if (key == "seeds") {
        s.seeds = to_seed_list(val);
        have_seeds = true;
      } else if (key == "verify") {
        s.verify = to_bool(val);
      } else if (key == "x") {
        s.x = val == "2/3" ? kTwoThirds : val == "1/3" ? 1.0 / 3.0 : to_double(val);
      } else if (key == "y") {
        s.y = val == "1/3" ? 1.0 / 3.0 : to_double(val);
      } else if (key == "epsilon") {
        s.epsilon = to_double(val);
      } else if (key == "sources") {
        s.sources = to_u64(val);
      } else if (key == "source_mode") {
        if (val != "random" && val != "spread") throw std::invalid_argument(val);
        s.source_mode = val;
      } else if (key == "source") {
        s.source = static_cast<std::uint32_t>(to_u64(val));
      } else if (key == "h_const") {
        s.h_const = to_double(val);
      } else if (key == "gamma_const") {
        s.gamma_const = to_double(val);
      } else if (key == "sampler_const") {
        s.sampler_const = to_double(val);
      } else if (key == "theta") {
        s.theta = to_double(val);
      } else if (key == "reassign_k") {
        s.reassign_k = to_double(val);
      } else if (key == "td_const") {
        s.td_const = to_double(val);
      } else if (key == "max_retries") {
        s.max_retries = static_cast<unsigned>(to_u64(val));
      } else if (key == "density") {
        s.density = to_double(val);
      } else if (key == "tail_frac") {
        s.tail_frac = to_double(val);
      } else if (key == "tokens") {
        s.tokens = to_u64(val);
      } else if (key == "sweep_over") {
        if (val != "n" && val != "tokens") throw std::invalid_argument(val);
        s.sweep_over = val;
      } else if (key == "sweep_metric") {
        s.sweep_metric = val;
      } else {
        fail(lineno, "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      fail(lineno, "bad value '" + val + "' for '" + key + "'");
    }
  }
  if (s.algorithm.empty()) fail(lineno, "missing 'algorithm'");
  if (!algorithms().count(s.algorithm)) fail(algo_line, "unknown algorithm '" + s.algorithm + "'");
  if (s.graphs.empty()) fail(lineno, "missing 'graph'");
  if (have_seeds && s.seeds.empty()) fail(lineno, "empty seed list");
  if (!(s.x > 0.0 && s.x < 1.0)) fail(lineno, "x must lie in (0,1)");
  if (!(s.y > 0.0 && s.y < 1.0)) fail(lineno, "y must lie in (0,1)");
  if (!(s.epsilon > 0.0)) fail(lineno, "epsilon must be positive");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, path + ": cannot open");
  Scenario s = parse_scenario(in, path);
  if (s.name == "scenario") s.name = std::filesystem::path(path).stem().string();
  return s;
}

// ---- runs ------------------------------------------------------------------

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  RunResult res;
  res.scenario = s;
  const std::vector<std::size_t> sizes = s.sizes.empty() ? std::vector<std::size_t>{0} : s.sizes;
  for (std::size_t gi = 0; gi < s.graphs.size(); ++gi)
    for (std::size_t size : sizes)
      for (std::uint64_t seed : s.seeds) {
        SeedRun r;
        r.index = res.runs.size();
        r.graph_index = gi;
        r.size = size;
        r.seed = seed;
        res.runs.push_back(std::move(r));
      }
  if (!opts.transcript_dir.empty()) std::filesystem::create_directories(opts.transcript_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(res.runs.size())));
  if (threads == 1) {
    for (auto& r : res.runs) execute(s, opts, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < res.runs.size(); i = next++) execute(s, opts, res.runs[i]);
      });
    for (auto& th : pool) th.join();
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs two or more points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "slope needs distinct x values");
  return num / den;
}

double polylog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw Error(ErrorKind::InvalidArgument, "polylog fit needs 4+ points");
  // Normal equations for y' = a u + b w + c with u = log x, w = log log x.
  double m[3][4] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double row[3] = {std::log(x[i]), std::log(std::log(x[i])), 1.0};
    const double t = std::log(y[i]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
      m[r][3] += row[r] * t;
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    if (std::abs(m[col][col]) < 1e-12) throw Error(ErrorKind::InvalidArgument, "degenerate polylog fit");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return m[0][3] / m[0][0];
}

SweepResult scaling_sweep(const Scenario& s, const RunOptions& opts) {
  if (s.sizes.size() < 3) throw Error(ErrorKind::InvalidArgument, "a sweep needs at least 3 sizes");
  if (s.seeds.size() < 3) throw Error(ErrorKind::InvalidArgument, "a sweep needs at least 3 seeds");
  SweepResult out;
  out.run = run_scenario(s, opts);
  std::vector<double> xs, ys;
  for (std::size_t size : s.sizes) {
    std::vector<double> vals;
    for (const auto& r : out.run.runs)
      if (r.size == size && r.ok()) vals.push_back(metric_of(s, r));
    if (vals.empty()) throw Error(ErrorKind::InvalidArgument, "no successful run at size " + std::to_string(size));
    const double med = median_of(vals);
    if (med <= 0) throw Error(ErrorKind::InvalidArgument, "metric '" + s.sweep_metric + "' is zero at size " +
                                                              std::to_string(size));
    out.table.push_back({size, med, vals.size()});
    xs.push_back(static_cast<double>(size));
    ys.push_back(med);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  out.slope = least_squares_slope(lx, ly);
  if (xs.size() >= 4) out.slope_polylog = polylog_slope(xs, ys);
  return out;
}

TranscriptAudit audit_transcript(std::istream& in) {
  TranscriptAudit a;
  std::unordered_map<std::uint64_t, std::uint32_t> sent, recv;
  std::uint64_t current = std::numeric_limits<std::uint64_t>::max();
  std::string line, kind;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint64_t round = 0, from = 0, to = 0, words = 0;
    if (!(ls >> round >> from >> to >> kind >> words)) continue;
    if (round != current) {
      sent.clear();
      recv.clear();
      current = round;
      ++a.rounds;
    }
    if (kind != "global") continue;
    a.max_send = std::max(a.max_send, sent[from] += static_cast<std::uint32_t>(words));
    a.max_recv = std::max(a.max_recv, recv[to] += static_cast<std::uint32_t>(words));
  }
  return a;
}

// ---- output ----------------------------------------------------------------

void write_results_csv(std::ostream& out, const RunResult& r) {
  out << "scenario,algorithm,graph,size,n,m,seed,status,rounds,retries,tiered_retries,skeleton_size,hop_radius,"
         "max_error,violations,drops,gamma,max_send,max_recv,extra\n";
  for (const auto& s : r.runs) {
    std::string extra;
    for (const auto& [k, v] : s.extra) extra += (extra.empty() ? "" : ";") + k + "=" + fmt(v);
    out << csv_field(r.scenario.name) << ',' << r.scenario.algorithm << ',' << csv_field(s.graph) << ',' << s.size
        << ',' << s.n << ',' << s.m << ',' << s.seed << ',' << csv_field(s.status) << ',' << s.rounds << ','
        << s.retries << ',' << s.tiered_retries << ',' << s.skeleton_size << ',' << s.hop_radius << ','
        << fmt(s.max_error) << ',' << s.violations << ',' << s.drops << ',' << s.gamma << ',' << s.max_send << ','
        << s.max_recv << ',' << csv_field(extra) << '\n';
  }
}

void write_ledger_csv(std::ostream& out, const RunResult& r) {
  out << "scenario,run,graph_index,size,seed,phase,rounds,local_msgs,global_msgs,drops\n";
  for (const auto& s : r.runs)
    for (const auto& p : s.phases)
      out << csv_field(r.scenario.name) << ',' << s.index << ',' << s.graph_index << ',' << s.size << ',' << s.seed
          << ',' << csv_field(p.phase) << ',' << p.totals.rounds << ',' << p.totals.local_msgs << ','
          << p.totals.global_msgs << ',' << p.totals.drops << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepResult& s) {
  out << "size,median_metric,runs\n";
  for (const auto& row : s.table) out << row.size << ',' << fmt(row.median) << ',' << row.runs << '\n';
}

void write_summary(std::ostream& out, const RunResult& r, const SweepResult* sweep) {
  std::size_t ok = 0;
  std::uint64_t violations = 0, drops = 0;
  unsigned retries = 0;
  double max_error = 0.0;
  std::vector<double> rounds;
  for (const auto& s : r.runs) {
    ok += s.ok();
    violations += s.violations;
    drops += s.drops;
    retries = std::max(retries, s.retries);
    max_error = std::max(max_error, s.max_error);
    if (s.ok()) rounds.push_back(static_cast<double>(s.rounds));
  }
  out << "scenario: " << r.scenario.name << '\n'
      << "algorithm: " << r.scenario.algorithm << '\n'
      << "runs: " << r.runs.size() << " (ok " << ok << ", failed " << r.runs.size() - ok << ")\n"
      << "verify: " << (r.scenario.verify ? "yes" : "no") << '\n'
      << "violations: " << violations << '\n'
      << "max_error: " << fmt(max_error) << '\n'
      << "max_retries: " << retries << '\n'
      << "global_drops: " << drops << '\n'
      << "median_rounds: " << (rounds.empty() ? std::string("n/a") : fmt(median_of(rounds))) << '\n'
      << "wall_seconds: " << std::fixed << std::setprecision(2) << r.wall_seconds << std::defaultfloat << '\n';
  for (const auto& s : r.runs)
    if (!s.ok()) out << "failed run " << s.index << " seed " << s.seed << ": " << s.status << '\n';
  if (sweep) {
    out << "sweep over " << r.scenario.sweep_over << ", metric " << r.scenario.sweep_metric << '\n';
    for (const auto& row : sweep->table)
      out << "  " << row.size << ": median " << fmt(row.median) << " over " << row.runs << " runs\n";
    out << "slope: " << fmt(sweep->slope) << '\n';
    if (sweep->slope_polylog) out << "slope_polylog: " << fmt(*sweep->slope_polylog) << '\n';
  }
}

void write_outputs(const std::string& dir, const RunResult& r, const SweepResult* sweep) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream res(base / "results.csv"), led(base / "ledger.csv"), sum(base / "summary.txt");
  if (!res || !led || !sum) throw Error(ErrorKind::InvalidArgument, "cannot write outputs under " + dir);
  write_results_csv(res, r);
  write_ledger_csv(led, r);
  write_summary(sum, r, sweep);
  if (sweep) {
    std::ofstream sw(base / "sweep.csv");
    write_sweep_csv(sw, *sweep);
  }
}

}  // namespace hybrid
