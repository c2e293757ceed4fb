#include "surplus/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "surplus/rng.hpp"

namespace surplus {

namespace {

void check_node(int i, int n, const char* what) {
  if (i < 1 || i > n)
    throw std::invalid_argument(std::string(what) + " node " + std::to_string(i) +
                                " out of range 1.." + std::to_string(n));
}

/// reached[v-1] = v reachable from `start` (start counts as reached).
std::vector<bool> reachable_from(const Digraph& g, int start) {
  std::vector<bool> reached(static_cast<std::size_t>(g.node_count()), false);
  std::vector<int> stack{start};
  reached[static_cast<std::size_t>(start - 1)] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : g.out_neighbors(u)) {
      if (!reached[static_cast<std::size_t>(v - 1)]) {
        reached[static_cast<std::size_t>(v - 1)] = true;
        stack.push_back(v);
      }
    }
  }
  return reached;
}

}  // namespace

Digraph::Digraph(int node_count, const std::vector<Edge>& edges) : n_(node_count) {
  if (node_count < 1) throw std::invalid_argument("node count must be >= 1");
  in_.resize(static_cast<std::size_t>(n_));
  out_.resize(static_cast<std::size_t>(n_));
  std::set<Edge> unique(edges.begin(), edges.end());
  for (const auto& [from, to] : unique) {
    check_node(from, n_, "edge source");
    check_node(to, n_, "edge target");
    if (from == to)
      throw std::invalid_argument("self-loop (" + std::to_string(from) + "," +
                                  std::to_string(to) + ") not allowed");
    out_[static_cast<std::size_t>(from - 1)].push_back(to);
    in_[static_cast<std::size_t>(to - 1)].push_back(from);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
  for (auto& v : out_) std::sort(v.begin(), v.end());
  edge_count_ = unique.size();
}

bool Digraph::has_edge(int from, int to) const {
  check_node(from, n_, "edge source");
  check_node(to, n_, "edge target");
  const auto& nbrs = out_[static_cast<std::size_t>(from - 1)];
  return std::binary_search(nbrs.begin(), nbrs.end(), to);
}

const std::vector<int>& Digraph::in_neighbors(int i) const {
  check_node(i, n_, "query");
  return in_[static_cast<std::size_t>(i - 1)];
}

const std::vector<int>& Digraph::out_neighbors(int i) const {
  check_node(i, n_, "query");
  return out_[static_cast<std::size_t>(i - 1)];
}

std::vector<Edge> Digraph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(edge_count_);
  for (int i = 1; i <= n_; ++i)
    for (int h : out_[static_cast<std::size_t>(i - 1)]) edges.emplace_back(i, h);
  std::sort(edges.begin(), edges.end());
  return edges;
}

TopologySchedule TopologySchedule::static_graph(Digraph g) {
  TopologySchedule s;
  s.kind_ = Kind::static_graph;
  s.n_ = g.node_count();
  s.phases_.push_back(std::move(g));
  return s;
}

TopologySchedule TopologySchedule::periodic(std::vector<Digraph> phases) {
  if (phases.empty()) throw std::invalid_argument("periodic schedule needs at least one phase");
  TopologySchedule s;
  s.kind_ = Kind::periodic;
  s.n_ = phases.front().node_count();
  for (const auto& g : phases)
    if (g.node_count() != s.n_)
      throw std::invalid_argument("all phases of a schedule must share the node count");
  s.phases_ = std::move(phases);
  return s;
}

TopologySchedule TopologySchedule::scripted(std::vector<Digraph> script) {
  TopologySchedule s = periodic(std::move(script));
  s.kind_ = Kind::scripted;
  return s;
}

TopologySchedule TopologySchedule::random(int node_count, double edge_probability,
                                          std::uint64_t seed) {
  if (node_count < 1) throw std::invalid_argument("node count must be >= 1");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0))
    throw std::invalid_argument("edge probability must be in (0, 1]");
  TopologySchedule s;
  s.kind_ = Kind::random;
  s.n_ = node_count;
  s.edge_probability_ = edge_probability;
  s.seed_ = seed;
  return s;
}

long TopologySchedule::period() const noexcept {
  return kind_ == Kind::random ? 0 : static_cast<long>(phases_.size());
}

std::optional<long> TopologySchedule::length() const noexcept {
  if (kind_ == Kind::scripted) return static_cast<long>(phases_.size());
  return std::nullopt;
}

Digraph TopologySchedule::graph(long k) const {
  if (k < 0) throw std::invalid_argument("time index must be >= 0");
  switch (kind_) {
    case Kind::static_graph:
      return phases_.front();
    case Kind::periodic:
      return phases_[static_cast<std::size_t>(k % period())];
    case Kind::scripted:
      if (k >= static_cast<long>(phases_.size()))
        throw std::out_of_range("scripted schedule of length " +
                                std::to_string(phases_.size()) + " has no graph at k=" +
                                std::to_string(k));
      return phases_[static_cast<std::size_t>(k)];
    case Kind::random: {
      // Edge (j,i) exists iff the stream for (seed, k), consumed in row-major
      // (j, i) order skipping j == i, yields a draw < p.
      SplitMix64 rng = SplitMix64::substream(seed_, static_cast<std::uint64_t>(k));
      std::vector<Edge> edges;
      for (int j = 1; j <= n_; ++j)
        for (int i = 1; i <= n_; ++i) {
          if (i == j) continue;
          if (rng.next_double() < edge_probability_) edges.emplace_back(j, i);
        }
      return Digraph(n_, edges);
    }
  }
  throw std::logic_error("unreachable");
}

Digraph union_digraph(const TopologySchedule& schedule, long k1, long k2) {
  if (k1 > k2)
    throw std::invalid_argument("union interval [" + std::to_string(k1) + "," +
                                std::to_string(k2) + "] is empty");
  std::set<Edge> edges;
  for (long k = k1; k <= k2; ++k) {
    const auto step_edges = schedule.graph(k).edge_list();
    edges.insert(step_edges.begin(), step_edges.end());
  }
  return Digraph(schedule.node_count(), {edges.begin(), edges.end()});
}

bool is_strongly_connected(const Digraph& g) {
  const int n = g.node_count();
  if (n == 1) return true;
  const auto forward = reachable_from(g, 1);
  if (std::find(forward.begin(), forward.end(), false) != forward.end()) return false;
  // Reverse reachability of node 1: walk in-neighbors.
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<int> stack{1};
  reached[0] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : g.in_neighbors(u)) {
      if (!reached[static_cast<std::size_t>(v - 1)]) {
        reached[static_cast<std::size_t>(v - 1)] = true;
        stack.push_back(v);
      }
    }
  }
  return std::find(reached.begin(), reached.end(), false) == reached.end();
}

std::vector<std::vector<int>> strong_components(const Digraph& g) {
  // Kosaraju: order nodes by DFS finish time, then sweep the reverse graph.
  const int n = g.node_count();
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int start = 1; start <= n; ++start) {
    if (visited[static_cast<std::size_t>(start - 1)]) continue;
    // Iterative DFS recording finish order; frame second = next child index.
    std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
    visited[static_cast<std::size_t>(start - 1)] = true;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto& nbrs = g.out_neighbors(u);
      if (next < nbrs.size()) {
        const int v = nbrs[next++];
        if (!visited[static_cast<std::size_t>(v - 1)]) {
          visited[static_cast<std::size_t>(v - 1)] = true;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  std::vector<int> component_of(static_cast<std::size_t>(n), 0);
  int component_count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component_of[static_cast<std::size_t>(*it - 1)] != 0) continue;
    ++component_count;
    std::vector<int> stack{*it};
    component_of[static_cast<std::size_t>(*it - 1)] = component_count;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.in_neighbors(u)) {
        if (component_of[static_cast<std::size_t>(v - 1)] == 0) {
          component_of[static_cast<std::size_t>(v - 1)] = component_count;
          stack.push_back(v);
        }
      }
    }
  }

  std::vector<std::vector<int>> components(static_cast<std::size_t>(component_count));
  for (int v = 1; v <= n; ++v)
    components[static_cast<std::size_t>(component_of[static_cast<std::size_t>(v - 1)] - 1)]
        .push_back(v);
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

std::vector<std::vector<int>> closed_components(const Digraph& g) {
  const auto components = strong_components(g);
  std::vector<int> component_of(static_cast<std::size_t>(g.node_count()), 0);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (int v : components[c]) component_of[static_cast<std::size_t>(v - 1)] = static_cast<int>(c);

  std::vector<std::vector<int>> closed;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool has_external_in = false;
    for (int v : components[c]) {
      for (int u : g.in_neighbors(v)) {
        if (component_of[static_cast<std::size_t>(u - 1)] != static_cast<int>(c)) {
          has_external_in = true;
          break;
        }
      }
      if (has_external_in) break;
    }
    if (!has_external_in) closed.push_back(components[c]);
  }
  return closed;
}

std::vector<int> globally_reachable_nodes(const Digraph& g) {
  std::vector<int> result;
  for (int v = 1; v <= g.node_count(); ++v) {
    const auto reached = reachable_from(g, v);
    if (std::find(reached.begin(), reached.end(), false) == reached.end()) result.push_back(v);
  }
  return result;
}

bool is_jointly_strongly_connected(const TopologySchedule& schedule, long window, long horizon) {
  if (window < 0) throw std::invalid_argument("window must be >= 0");
  switch (schedule.kind()) {
    case TopologySchedule::Kind::static_graph:
    case TopologySchedule::Kind::periodic: {
      // Union edges depend on k0 only through k0 mod P: one period is exact.
      for (long k0 = 0; k0 < schedule.period(); ++k0)
        if (!is_strongly_connected(union_digraph(schedule, k0, k0 + window))) return false;
      return true;
    }
    case TopologySchedule::Kind::scripted:
    case TopologySchedule::Kind::random: {
      long last = horizon;
      if (const auto len = schedule.length()) last = std::min(last, *len - 1);
      if (last - window < 0)
        throw std::invalid_argument("window " + std::to_string(window) +
                                    " does not fit in horizon " + std::to_string(horizon));
      for (long k0 = 0; k0 + window <= last; ++k0)
        if (!is_strongly_connected(union_digraph(schedule, k0, k0 + window))) return false;
      return true;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace surplus
