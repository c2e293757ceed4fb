#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace surplus {

/// Directed edge (from, to): `from` communicates to `to`. Nodes are 1-based.
using Edge = std::pair<int, int>;

/// Immutable digraph on nodes 1..n. No self-loops; duplicate edges collapse.
///
/// All public interfaces speak 1-based node identifiers. Vectors indexed by
/// node elsewhere in the library put node i at position i-1.
class Digraph {
 public:
  Digraph(int node_count, const std::vector<Edge>& edges);

  int node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool has_edge(int from, int to) const;

  /// Nodes j with an edge (j, i), sorted ascending. Never contains i.
  const std::vector<int>& in_neighbors(int i) const;

  /// Nodes h with an edge (i, h), sorted ascending. Never contains i.
  const std::vector<int>& out_neighbors(int i) const;

  /// All edges, sorted lexicographically.
  std::vector<Edge> edge_list() const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  int n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<int>> in_;   // in_[i-1]: sorted in-neighbors of node i
  std::vector<std::vector<int>> out_;  // out_[i-1]: sorted out-neighbors of node i
};

/// A rule producing the digraph at each time step k >= 0.
///
/// Kinds:
///  - static_graph: the same digraph at every k.
///  - periodic:     graph(k) = phases[k mod P].
///  - scripted:     a finite list; graph(k) is defined for k < length only.
///  - random:       every ordered pair (j,i), j != i, present independently
///                  with probability p; deterministic given (seed, k).
class TopologySchedule {
 public:
  enum class Kind { static_graph, periodic, scripted, random };

  static TopologySchedule static_graph(Digraph g);
  static TopologySchedule periodic(std::vector<Digraph> phases);
  static TopologySchedule scripted(std::vector<Digraph> script);
  static TopologySchedule random(int node_count, double edge_probability, std::uint64_t seed);

  Kind kind() const noexcept { return kind_; }
  int node_count() const noexcept { return n_; }

  /// Number of distinct phases: 1 for static, P for periodic, the script
  /// length for scripted. Random schedules have no period; returns 0.
  long period() const noexcept;

  /// Script length, or nullopt for unbounded kinds.
  std::optional<long> length() const noexcept;

  /// The digraph at time k. Throws std::out_of_range past a script's end.
  Digraph graph(long k) const;

  const std::vector<Digraph>& phases() const noexcept { return phases_; }
  double edge_probability() const noexcept { return edge_probability_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  TopologySchedule() = default;

  Kind kind_ = Kind::static_graph;
  int n_ = 0;
  std::vector<Digraph> phases_;   // static/periodic/scripted
  double edge_probability_ = 0;   // random only
  std::uint64_t seed_ = 0;        // random only
};

/// Digraph whose edge set is the union over the inclusive interval [k1, k2].
Digraph union_digraph(const TopologySchedule& schedule, long k1, long k2);

/// True iff every node is reachable from every other node. A single node is
/// strongly connected.
bool is_strongly_connected(const Digraph& g);

/// Partition into strongly connected components. Components are ordered by
/// their smallest node; nodes within a component ascend.
std::vector<std::vector<int>> strong_components(const Digraph& g);

/// The strong components with no incoming edge from outside the component.
std::vector<std::vector<int>> closed_components(const Digraph& g);

/// Nodes from which every other node is reachable, sorted ascending.
std::vector<int> globally_reachable_nodes(const Digraph& g);

/// True iff the union digraph over [k0, k0+window] is strongly connected for
/// every checked start time k0.
///
/// For static and periodic schedules the check runs one start per phase
/// offset, which is exact for all k0. For scripted and random schedules it
/// runs k0 in [0, horizon - window] (capped at the script end), so the
/// result is empirical over that horizon, not a proof.
bool is_jointly_strongly_connected(const TopologySchedule& schedule, long window,
                                   long horizon = -1);

}  // namespace surplus
