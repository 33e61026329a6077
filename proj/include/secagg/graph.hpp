#pragma once

#include <cstdint>
#include <vector>

namespace secagg {

enum class GraphMode : uint8_t { full = 0, neighbor = 1 };

// undirected communication graph over positions 0 .. n-1
struct NeighborGraph {
  uint32_t n = 0;
  uint32_t degree = 0;
  std::vector<std::vector<uint32_t>> adj;  // sorted per vertex
};

// degree used when the caller does not pin one: 2 * ceil(log2 n),
// which keeps per-client cost logarithmic while the graph stays
// connected with overwhelming probability
uint32_t default_degree(uint32_t n);

// Full graph, or a k-regular graph built from one random vertex ring:
// each vertex links to the k/2 nearest ring positions on either side.
// The ring itself is a spanning cycle, so the graph is connected, and
// distinct offsets below n/2 never produce a duplicate edge.
NeighborGraph build_neighbor_graph(uint32_t n, GraphMode mode,
                                   uint32_t degree, uint64_t seed);

bool graph_connected(const NeighborGraph &g);

}  // namespace secagg
