#include "hybrid/local_view.hpp"

#include <algorithm>

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

// Record on the wire: id, annotation, then the neighbor ids.
class FloodProgram : public NodeProgram {
 public:
  FloodProgram(std::size_t n, unsigned h, Word annotation)
      : h_(h), annotation_(annotation), known_(n, 0) {}

  StepResult step(const StepContext& ctx, std::span<const Envelope> inbox) override {
    StepResult out;
    std::vector<std::vector<Word>> fresh;
    if (ctx.round == 0) {
      known_[ctx.self] = 1;
      std::vector<Word> rec{ctx.self, annotation_};
      for (const Arc& a : ctx.graph->neighbors(ctx.self)) rec.push_back(a.to);
      records_.push_back(rec);
      fresh.push_back(std::move(rec));
    }
    for (const auto& e : inbox) {
      auto id = static_cast<NodeId>(e.payload[0]);
      if (known_[id]) continue;
      known_[id] = 1;
      records_.push_back(e.payload);
      fresh.push_back(e.payload);
    }
    if (ctx.round >= h_) {
      out.halt = true;
      return out;
    }
    for (const auto& rec : fresh)
      for (const Arc& a : ctx.graph->neighbors(ctx.self))
        out.sends.push_back({ctx.self, a.to, Channel::Local, rec});
    return out;
  }

  const std::vector<std::vector<Word>>& records() const { return records_; }

 private:
  unsigned h_;
  Word annotation_;
  std::vector<char> known_;
  std::vector<std::vector<Word>> records_;
};

}  // namespace

LocalKnowledge broadcast_local_neighborhood(Network& net, NodeId v, unsigned h,
                                            std::span<const Word> annotations) {
  if (h == 0) throw Error(ErrorKind::InvalidArgument, "radius must be at least 1");
  auto scope = net.phase("local-view");
  const std::size_t n = net.n();
  ProgramList progs;
  progs.reserve(n);
  for (NodeId u = 0; u < n; ++u)
    progs.push_back(std::make_unique<FloodProgram>(n, h, annotations.empty() ? 0 : annotations[u]));
  run_hybrid(net, progs, h + 1);

  const auto& recs = static_cast<FloodProgram&>(*progs[v]).records();
  LocalKnowledge k;
  k.center = v;
  k.radius = h;
  std::vector<char> in(n, 0);
  for (const auto& r : recs) {
    k.nodes.push_back(static_cast<NodeId>(r[0]));
    in[r[0]] = 1;
  }
  std::sort(k.nodes.begin(), k.nodes.end());
  for (const auto& r : recs) {
    auto u = static_cast<NodeId>(r[0]);
    k.annotations.push_back({u, r[1]});
    for (std::size_t i = 2; i < r.size(); ++i) {
      auto w = static_cast<NodeId>(r[i]);
      if (u < w && in[w]) k.edges.push_back({u, w, *net.graph().edge_weight(u, w)});
    }
  }
  std::sort(k.annotations.begin(), k.annotations.end());
  std::sort(k.edges.begin(), k.edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return k;
}

}  // namespace hybrid
