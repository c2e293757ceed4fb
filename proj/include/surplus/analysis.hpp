#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "surplus/protocol.hpp"
#include "surplus/types.hpp"

namespace surplus {

template <class Scalar>
Scalar min_state(const NetworkState<Scalar>& st) {
  return st.states.minCoeff();
}

template <class Scalar>
Scalar max_state(const NetworkState<Scalar>& st) {
  return st.states.maxCoeff();
}

/// The conserved quantity divided by n: (1'x + 1's) / n. Constant along any
/// trajectory; equals the target consensus value when surpluses start at 0.
template <class Scalar>
Scalar conserved_average(const NetworkState<Scalar>& st) {
  return (st.states.sum() + st.surpluses.sum()) / Scalar(st.states.size());
}

/// Lyapunov function: conserved average minus minimum state. Nonnegative on
/// states with nonnegative surpluses, non-increasing along gated
/// trajectories, and zero exactly at the consensus point.
template <class Scalar>
Scalar lyapunov(const NetworkState<Scalar>& st) {
  return conserved_average(st) - min_state(st);
}

enum class Norm { l1, linf };

/// Norm of the stacked deviation (x - average*1, s) from the consensus point.
template <class Scalar>
Scalar consensus_distance(const NetworkState<Scalar>& st, Scalar average, Norm norm) {
  const auto state_dev = (st.states.array() - average).abs();
  const auto surplus_dev = st.surpluses.array().abs();
  if (norm == Norm::l1) return state_dev.sum() + surplus_dev.sum();
  return std::max(state_dev.maxCoeff(), surplus_dev.maxCoeff());
}

/// Per-step instrumentation row. `switch_count` is the number of agents
/// whose gate closed at time k (positive neighbor term suppressed); the row
/// for the final state, where no decision is taken, reports 0.
struct MetricsRow {
  long k = 0;
  double min_state = 0;
  double max_state = 0;
  double lyapunov = 0;
  double conserved_sum = 0;  // 1'(x + s), undivided
  double dist_l1 = 0;
  double dist_inf = 0;
  long switch_count = 0;
};

/// One row per visited state, k = 0 .. trajectory.steps(). Distances are
/// measured from the consensus point of the initial conserved average.
template <class Scalar>
std::vector<MetricsRow> trajectory_metrics(const Trajectory<Scalar>& trajectory) {
  const Scalar average = conserved_average(trajectory.initial);
  std::vector<MetricsRow> rows;
  rows.reserve(static_cast<std::size_t>(trajectory.steps()) + 1);
  for (long k = 0; k <= trajectory.steps(); ++k) {
    const NetworkState<Scalar> st = trajectory.state_at(k);
    MetricsRow row;
    row.k = k;
    row.min_state = static_cast<double>(min_state(st));
    row.max_state = static_cast<double>(max_state(st));
    row.lyapunov = static_cast<double>(lyapunov(st));
    row.conserved_sum = static_cast<double>(st.states.sum() + st.surpluses.sum());
    row.dist_l1 = static_cast<double>(consensus_distance(st, average, Norm::l1));
    row.dist_inf = static_cast<double>(consensus_distance(st, average, Norm::linf));
    if (k < trajectory.steps())
      row.switch_count =
          (trajectory.records[static_cast<std::size_t>(k)].gate == false).count();
    rows.push_back(row);
  }
  return rows;
}

/// Smallest k with the chosen norm of (x(k) - average*1, s(k)) strictly below
/// `threshold`; nullopt when no visited state qualifies.
template <class Scalar>
std::optional<long> convergence_time(const Trajectory<Scalar>& trajectory, Scalar average,
                                     Scalar threshold, Norm norm) {
  if (!(threshold > Scalar(0))) throw std::invalid_argument("threshold must be > 0");
  for (long k = 0; k <= trajectory.steps(); ++k)
    if (consensus_distance(trajectory.state_at(k), average, norm) < threshold) return k;
  return std::nullopt;
}

/// Steps after which the minimum state is guaranteed to strictly increase
/// (while below the consensus value), for n agents under a schedule whose
/// unions over `window`-length intervals are strongly connected:
/// (n-1)(n+1)*window.
constexpr long min_increase_horizon(long n, long window) {
  return (n - 1) * (n + 1) * window;
}

/// Observed Lyapunov decrease V(k0) - V(k0 + horizon) along this trajectory.
/// A per-trajectory witness of the decrease available from the visited
/// state; no minimization over alternative switching sequences is attempted.
template <class Scalar>
Scalar lyapunov_drop(const Trajectory<Scalar>& trajectory, long k0, long horizon) {
  if (k0 < 0 || horizon < 0 || k0 + horizon > trajectory.steps())
    throw std::invalid_argument("drop window [k0, k0+horizon] outside the trajectory");
  return lyapunov(trajectory.state_at(k0)) - lyapunov(trajectory.state_at(k0 + horizon));
}

struct MinIncreaseViolation {
  long k0 = 0;
  double min_at_start = 0;
  double min_at_horizon = 0;
};

struct MinIncreaseReport {
  long horizon = 0;         // the min_increase_horizon used
  long checked_starts = 0;  // start times with the minimum below the average
  std::vector<MinIncreaseViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Verify that min_state(k0 + horizon) > min_state(k0) for every start k0
/// whose minimum sits strictly below the conserved average. Only meaningful
/// for the gated algorithm; baseline trajectories are rejected (their
/// minimum can decrease).
template <class Scalar>
MinIncreaseReport check_min_increase(const Trajectory<Scalar>& trajectory, long window, long n) {
  if (trajectory.algorithm == Algorithm::baseline)
    throw std::invalid_argument("min-increase check does not apply to baseline trajectories");
  if (n != trajectory.initial.states.size())
    throw std::invalid_argument("node count does not match the trajectory");
  const long horizon = min_increase_horizon(n, window);
  if (trajectory.steps() < horizon)
    throw std::invalid_argument("trajectory shorter than the min-increase horizon " +
                                std::to_string(horizon));

  const Scalar average = conserved_average(trajectory.initial);
  MinIncreaseReport report;
  report.horizon = horizon;
  for (long k0 = 0; k0 + horizon <= trajectory.steps(); ++k0) {
    const Scalar start_min = min_state(trajectory.state_at(k0));
    if (!(start_min < average)) continue;
    ++report.checked_starts;
    const Scalar later_min = min_state(trajectory.state_at(k0 + horizon));
    if (!(later_min > start_min))
      report.violations.push_back(
          {k0, static_cast<double>(start_min), static_cast<double>(later_min)});
  }
  return report;
}

}  // namespace surplus
