// Brute-force reference implementations used as oracles. Deliberately built
// on transitive closure over a dense boolean matrix, a different route from
// the library's traversal-based algorithms.
#pragma once

#include <vector>

#include "surplus/graph.hpp"

namespace oracle {

/// reach[u-1][v-1]: v reachable from u by a directed path (u counts as
/// reachable from itself). Warshall closure.
inline std::vector<std::vector<bool>> reachability(const surplus::Digraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int u = 1; u <= n; ++u) {
    reach[u - 1][u - 1] = true;
    for (int v : g.out_neighbors(u)) reach[u - 1][v - 1] = true;
  }
  for (int mid = 0; mid < n; ++mid)
    for (int u = 0; u < n; ++u)
      if (reach[u][mid])
        for (int v = 0; v < n; ++v)
          if (reach[mid][v]) reach[u][v] = true;
  return reach;
}

inline bool strongly_connected(const surplus::Digraph& g) {
  const auto reach = reachability(g);
  for (const auto& row : reach)
    for (bool r : row)
      if (!r) return false;
  return true;
}

/// Components as classes of pairwise mutual reachability, ordered by
/// smallest node, nodes ascending.
inline std::vector<std::vector<int>> strong_components(const surplus::Digraph& g) {
  const int n = g.node_count();
  const auto reach = reachability(g);
  std::vector<bool> assigned(n, false);
  std::vector<std::vector<int>> components;
  for (int u = 1; u <= n; ++u) {
    if (assigned[u - 1]) continue;
    std::vector<int> component;
    for (int v = u; v <= n; ++v)
      if (!assigned[v - 1] && reach[u - 1][v - 1] && reach[v - 1][u - 1]) {
        component.push_back(v);
        assigned[v - 1] = true;
      }
    components.push_back(std::move(component));
  }
  return components;
}

inline std::vector<int> globally_reachable_nodes(const surplus::Digraph& g) {
  const int n = g.node_count();
  const auto reach = reachability(g);
  std::vector<int> result;
  for (int u = 1; u <= n; ++u) {
    bool all = true;
    for (int v = 1; v <= n; ++v) all = all && reach[u - 1][v - 1];
    if (all) result.push_back(u);
  }
  return result;
}

}  // namespace oracle
