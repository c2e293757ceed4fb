#include "surplus/topologies.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace surplus {

namespace {

/// Directed cycle over the given nodes (size 1 yields no edges).
void append_cycle(std::vector<Edge>& edges, int first, int count) {
  if (count < 2) return;
  for (int offset = 0; offset < count; ++offset)
    edges.emplace_back(first + offset, first + (offset + 1) % count);
}

}  // namespace

TopologySchedule periodic_ring_4() {
  std::vector<Digraph> phases;
  phases.emplace_back(4, std::vector<Edge>{{1, 2}});
  phases.emplace_back(4, std::vector<Edge>{{2, 3}});
  phases.emplace_back(4, std::vector<Edge>{{3, 4}});
  phases.emplace_back(4, std::vector<Edge>{{4, 1}});
  return TopologySchedule::periodic(std::move(phases));
}

Digraph fig3_family(int n) {
  if (n < 3) throw std::invalid_argument("fig3_family requires n >= 3");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int from = 1; from <= n; ++from)
    for (int to = 1; to <= n; ++to) {
      if (from == to) continue;
      if (to == n && from >= 2 && from <= n - 1) continue;  // the removed edges (h, n)
      edges.emplace_back(from, to);
    }
  return Digraph(n, edges);
}

CounterexampleInstance counterexample_two_components(int n1, int n2, double a, double b) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("component sizes must be >= 1");
  const int n = n1 + n2;
  std::vector<Edge> edges;
  append_cycle(edges, 1, n1);
  append_cycle(edges, n1 + 1, n2);

  NetworkState<double> initial;
  initial.states = VectorX<double>(n);
  initial.states.head(n1).setConstant(a);
  initial.states.tail(n2).setConstant(b);
  initial.surpluses = VectorX<double>::Zero(n);
  return {TopologySchedule::static_graph(Digraph(n, edges)), std::move(initial)};
}

CounterexampleInstance counterexample_reachable_only(int n, int r, double a, double b) {
  if (r < 1 || r >= n)
    throw std::invalid_argument("need 1 <= r < n, got r=" + std::to_string(r) +
                                ", n=" + std::to_string(n));
  const int core = n - r;  // the globally reachable cycle
  std::vector<Edge> edges;
  append_cycle(edges, 1, core);
  for (int outsider = core + 1; outsider <= n; ++outsider) edges.emplace_back(1, outsider);

  NetworkState<double> initial;
  initial.states = VectorX<double>(n);
  initial.states.head(core).setConstant(a);
  initial.states.tail(r).setConstant(b);
  initial.surpluses = VectorX<double>::Zero(n);
  return {TopologySchedule::static_graph(Digraph(n, edges)), std::move(initial)};
}

TopologySchedule random_schedule(int n, double p, std::uint64_t seed) {
  return TopologySchedule::random(n, p, seed);
}

}  // namespace surplus
