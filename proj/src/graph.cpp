#include "secagg/graph.hpp"

#include <algorithm>

#include "secagg/errors.hpp"
#include "secagg/rng.hpp"

namespace secagg {

uint32_t default_degree(uint32_t n) {
  uint32_t lg = 0;
  while ((1u << lg) < n) ++lg;
  uint32_t k = 2 * lg;
  if (k < 2) k = 2;
  return k;
}

bool graph_connected(const NeighborGraph &g) {
  if (g.n == 0) return false;
  std::vector<char> seen(g.n, 0);
  std::vector<uint32_t> stack = {0};
  seen[0] = 1;
  uint32_t reached = 1;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t w : g.adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == g.n;
}

NeighborGraph build_neighbor_graph(uint32_t n, GraphMode mode,
                                   uint32_t degree, uint64_t seed) {
  if (n < 2) throw ParamError("need at least two parties");
  NeighborGraph g;
  g.n = n;
  g.adj.assign(n, {});

  uint32_t k = degree == 0 ? default_degree(n) : degree;
  if (mode == GraphMode::full || k >= n - 1) {
    g.degree = n - 1;
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j)
        if (i != j) g.adj[i].push_back(j);
    return g;
  }

  if (k % 2 != 0)
    throw ParamError("neighbor degree must be even or n - 1");
  if (k == 0) throw ParamError("neighbor degree must be positive");

  // k < n - 1 here, so every offset is below n / 2 and each edge
  // {order[i], order[i + d]} appears exactly once
  g.degree = k;
  Rng rng(seed);
  std::vector<uint32_t> order(n);
  for (uint32_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t d = 1; d <= k / 2; ++d) {
      uint32_t a = order[i], b = order[(i + d) % n];
      g.adj[a].push_back(b);
      g.adj[b].push_back(a);
    }
  for (auto &a : g.adj) std::sort(a.begin(), a.end());
  return g;
}

}  // namespace secagg
