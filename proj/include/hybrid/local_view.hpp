// local_view.hpp - literal h-round local flooding of node records
#pragma once

#include <span>
#include <vector>

#include "hybrid/engine.hpp"

namespace hybrid {

struct LocalKnowledge {
  NodeId center = 0;
  unsigned radius = 0;
  std::vector<NodeId> nodes;                      // sorted
  std::vector<Edge> edges;                        // among known nodes, u < v
  std::vector<std::pair<NodeId, Word>> annotations;  // (node, value) for known nodes
};

// Every node floods its record (id, annotation, incident edges) for exactly
// h rounds over the local channel; returns what v knows afterwards. Message
// level, so intended for graphs of a few thousand nodes.
LocalKnowledge broadcast_local_neighborhood(Network& net, NodeId v, unsigned h,
                                            std::span<const Word> annotations = {});

}  // namespace hybrid
