#pragma once

#include <cstdint>

#include "surplus/graph.hpp"
#include "surplus/protocol.hpp"

namespace surplus {

/// Period-4 schedule on 4 nodes, one edge per phase: (1,2), (2,3), (3,4),
/// (4,1). No single phase is strongly connected; the union over any window
/// of length 3 is the directed 4-cycle, so the schedule is jointly strongly
/// connected.
TopologySchedule periodic_ring_4();

/// Complete digraph on n nodes minus the edges {(h, n) : h in [2, n-1]}.
/// Strongly connected but far from balanced: node n keeps only the single
/// in-edge (1, n) against n-1 out-edges. Requires n >= 3.
Digraph fig3_family(int n);

/// A schedule together with the initial condition that exhibits its behavior.
struct CounterexampleInstance {
  TopologySchedule schedule;
  NetworkState<double> initial;
};

/// Static digraph of two disjoint directed cycles (sizes n1, n2), each
/// component internally at consensus: value `a` on the first cycle, `b` on
/// the second, surpluses zero. With a != b nothing ever updates, so the
/// network stays at distance max(|a-b|*n2/n, |a-b|*n1/n) from the average.
CounterexampleInstance counterexample_two_components(int n1, int n2, double a = 1.0,
                                                     double b = -1.0);

/// Static digraph where nodes 1..n-r form a directed cycle (the globally
/// reachable set) and node 1 feeds each of the remaining r nodes, with no
/// edges back. Initial value `a` on the cycle, `b` elsewhere, surpluses
/// zero. The cycle nodes receive nothing from outside and never change, so
/// the average is unreachable; with the default a > b the whole network is
/// frozen. Requires 1 <= r < n.
CounterexampleInstance counterexample_reachable_only(int n, int r, double a = 1.0,
                                                     double b = -1.0);

/// Each ordered pair (j, i), j != i, present independently with probability
/// p at every step; deterministic given (seed, k). Requires p in (0, 1].
TopologySchedule random_schedule(int n, double p, std::uint64_t seed);

}  // namespace surplus
