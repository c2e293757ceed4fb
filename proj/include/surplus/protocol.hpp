#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "surplus/errors.hpp"
#include "surplus/graph.hpp"
#include "surplus/types.hpp"

namespace surplus {

/// Paired agent states and surpluses. Node i's entries sit at index i-1.
template <class Scalar>
struct NetworkState {
  VectorX<Scalar> states;
  VectorX<Scalar> surpluses;

  Eigen::Index size() const noexcept { return states.size(); }
};

/// Dense weight tables realized for one digraph at one time step.
///
///  update(i-1, j-1):      mixing weight node i applies to in-neighbor j
///  send(i-1, h-1):        surplus fraction node i sends to out-neighbor h
///  surplus_gain(i-1):     fraction of its own surplus node i folds into its state
template <class Scalar>
struct WeightTables {
  MatrixX<Scalar> update;
  MatrixX<Scalar> send;
  VectorX<Scalar> surplus_gain;
};

/// Produces the per-step weights. Two modes:
///  - uniform: one value per weight class, applied to every edge present;
///  - explicit tables: dense tables, either constant or keyed by time step.
template <class Scalar>
class WeightPolicy {
 public:
  enum class Mode { uniform, explicit_tables };

  static WeightPolicy uniform(Scalar update_weight, Scalar send_weight, Scalar surplus_gain) {
    WeightPolicy p;
    p.mode_ = Mode::uniform;
    p.update_weight_ = update_weight;
    p.send_weight_ = send_weight;
    p.surplus_gain_ = surplus_gain;
    return p;
  }

  static WeightPolicy explicit_tables(WeightTables<Scalar> tables) {
    check_table_shape(tables);
    WeightPolicy p;
    p.mode_ = Mode::explicit_tables;
    p.constant_ = std::move(tables);
    return p;
  }

  /// Explicit mode with per-step tables only; lookups at a time with no
  /// table registered throw.
  static WeightPolicy explicit_keyed() {
    WeightPolicy p;
    p.mode_ = Mode::explicit_tables;
    return p;
  }

  /// Tables used at exactly time k (overrides the constant tables there).
  void set_tables_at(long k, WeightTables<Scalar> tables) {
    check_table_shape(tables);
    if (mode_ != Mode::explicit_tables) throw std::invalid_argument("policy is not in explicit mode");
    keyed_[k] = std::move(tables);
  }

  Mode mode() const noexcept { return mode_; }
  bool constant_in_time() const noexcept { return mode_ == Mode::uniform || keyed_.empty(); }
  Scalar uniform_update_weight() const { return update_weight_; }
  Scalar uniform_send_weight() const { return send_weight_; }
  Scalar uniform_surplus_gain() const { return surplus_gain_; }
  const std::optional<WeightTables<Scalar>>& constant_tables() const noexcept { return constant_; }
  const std::map<long, WeightTables<Scalar>>& keyed_tables() const noexcept { return keyed_; }

  /// Dense tables for digraph g at time k. Uniform mode places the class
  /// value on every edge present in g; explicit mode returns the stored
  /// tables after a size check against g.
  WeightTables<Scalar> realize(const Digraph& g, long k) const {
    const int n = g.node_count();
    if (mode_ == Mode::uniform) {
      WeightTables<Scalar> t;
      t.update = MatrixX<Scalar>::Zero(n, n);
      t.send = MatrixX<Scalar>::Zero(n, n);
      t.surplus_gain = VectorX<Scalar>::Constant(n, surplus_gain_);
      for (int i = 1; i <= n; ++i) {
        for (int j : g.in_neighbors(i)) t.update(i - 1, j - 1) = update_weight_;
        for (int h : g.out_neighbors(i)) t.send(i - 1, h - 1) = send_weight_;
      }
      return t;
    }
    const auto keyed = keyed_.find(k);
    const WeightTables<Scalar>& t = keyed != keyed_.end() ? keyed->second
                                    : constant_          ? *constant_
                                                         : throw std::invalid_argument(
                                                               "no weight tables for step " +
                                                               std::to_string(k));
    if (t.update.rows() != n)
      throw DimensionError("weight tables are " + std::to_string(t.update.rows()) +
                           "x" + std::to_string(t.update.cols()) + " but the digraph has " +
                           std::to_string(n) + " nodes");
    return t;
  }

 private:
  WeightPolicy() = default;

  static void check_table_shape(const WeightTables<Scalar>& t) {
    if (t.update.rows() != t.update.cols() || t.send.rows() != t.send.cols() ||
        t.update.rows() != t.send.rows() || t.surplus_gain.size() != t.update.rows())
      throw DimensionError("weight tables must be square matrices and a vector of one size");
  }

  Mode mode_ = Mode::uniform;
  Scalar update_weight_{0}, send_weight_{0}, surplus_gain_{0};
  std::optional<WeightTables<Scalar>> constant_;
  std::map<long, WeightTables<Scalar>> keyed_;
};

namespace detail {

template <class Scalar>
std::string format_scalar(Scalar v) {
  std::ostringstream out;
  out << static_cast<double>(v);
  return out.str();
}

}  // namespace detail

/// Check realized tables against (P1)-(P3) on g. The report lists every
/// violated inequality with the offending node.
template <class Scalar>
ValidationReport validate_tables(const WeightTables<Scalar>& w, const Digraph& g) {
  ValidationReport report;
  const int n = g.node_count();
  if (w.update.rows() != n)
    throw DimensionError("weight tables do not match the digraph's node count");

  for (int i = 1; i <= n; ++i) {
    const Scalar gain = w.surplus_gain(i - 1);
    if (!(gain > Scalar(0) && gain < Scalar(1)))
      report.violations.push_back(
          {"P1", i, "surplus gain " + detail::format_scalar(gain) + " outside (0,1)"});

    Scalar update_sum{0};
    for (int j : g.in_neighbors(i)) {
      const Scalar a = w.update(i - 1, j - 1);
      if (!(a > Scalar(0) && a < Scalar(1)))
        report.violations.push_back({"P2", i,
                                     "update weight for in-neighbor " + std::to_string(j) +
                                         " is " + detail::format_scalar(a) + ", outside (0,1)"});
      update_sum += a;
    }
    if (!(update_sum < Scalar(1)))
      report.violations.push_back({"P2", i,
                                   "update weights sum to " + detail::format_scalar(update_sum) +
                                       " (must be < 1)"});

    Scalar send_sum{0};
    for (int h : g.out_neighbors(i)) {
      const Scalar b = w.send(i - 1, h - 1);
      if (!(b > Scalar(0) && b < Scalar(1)))
        report.violations.push_back({"P3", i,
                                     "send weight for out-neighbor " + std::to_string(h) + " is " +
                                         detail::format_scalar(b) + ", outside (0,1)"});
      send_sum += b;
    }
    if (!(send_sum < Scalar(1) - gain))
      report.violations.push_back(
          {"P3", i,
           "send weights sum to " + detail::format_scalar(send_sum) + " (must be < 1 - " +
               detail::format_scalar(gain) + ")"});

    // Weights must vanish off the current edge set.
    for (int j = 1; j <= n; ++j) {
      if (w.update(i - 1, j - 1) != Scalar(0) && !g.has_edge(j, i))
        report.violations.push_back({"P2", i,
                                     "nonzero update weight for absent edge (" +
                                         std::to_string(j) + "," + std::to_string(i) + ")"});
      if (w.send(i - 1, j - 1) != Scalar(0) && !g.has_edge(i, j))
        report.violations.push_back({"P3", i,
                                     "nonzero send weight for absent edge (" + std::to_string(i) +
                                         "," + std::to_string(j) + ")"});
    }
  }
  return report;
}

template <class Scalar>
ValidationReport validate_weights(const WeightPolicy<Scalar>& policy, const Digraph& g,
                                  long k = 0) {
  return validate_tables(policy.realize(g, k), g);
}

/// Outcome of the per-node gate rule: the neighbor term
/// sum_j a_ij (x_j - x_i), and whether it is applied to the state.
template <class Scalar>
struct SwitchingDecision {
  bool gate = true;  // true: neighbor term enters the state update
  Scalar neighbor_term{0};
};

/// Gate rule for node i: the neighbor term is applied iff it is <= 0 (exact
/// floating-point comparison; any positive move must be paid from surplus).
/// An empty in-neighborhood gives a zero term and an open gate.
template <class Scalar>
SwitchingDecision<Scalar> switching_decision(const Digraph& g, const WeightPolicy<Scalar>& policy,
                                             const VectorX<Scalar>& states, int i, long k = 0) {
  const WeightTables<Scalar> w = policy.realize(g, k);
  if (states.size() != g.node_count())
    throw DimensionError("state vector size does not match the digraph");
  Scalar term{0};
  for (int j : g.in_neighbors(i)) term += w.update(i - 1, j - 1) * (states(j - 1) - states(i - 1));
  return {term <= Scalar(0), term};
}

/// One synchronous round: every agent reads time-k values and writes the
/// time-(k+1) values.
template <class Scalar>
struct StepRecord {
  long k = 0;
  BoolVector gate;                 // gate(i-1): node i applied its neighbor term
  VectorX<Scalar> neighbor_term;   // sum_j a_ij (x_j - x_i) per node
  VectorX<Scalar> x_next, s_next;
};

enum class Algorithm { surplus, baseline };

namespace detail {

/// Core update, Eqs in agent form. `gated` false runs the baseline variant
/// (neighbor term always applied, surpluses may go negative).
template <class Scalar>
StepRecord<Scalar> step_with_tables(const Digraph& g, const WeightTables<Scalar>& w,
                                    const NetworkState<Scalar>& st, long k, bool gated) {
  const int n = g.node_count();
  if (st.states.size() != n || st.surpluses.size() != n)
    throw DimensionError("state/surplus vectors must have length " + std::to_string(n));

  StepRecord<Scalar> rec;
  rec.k = k;
  rec.gate = BoolVector::Constant(n, true);
  rec.neighbor_term = VectorX<Scalar>::Zero(n);
  rec.x_next.resize(n);
  rec.s_next.resize(n);

  for (int i = 0; i < n; ++i) {
    Scalar term{0};
    for (int j : g.in_neighbors(i + 1))
      term += w.update(i, j - 1) * (st.states(j - 1) - st.states(i));
    const bool gate = gated ? (term <= Scalar(0)) : true;
    const Scalar applied = gate ? term : Scalar(0);

    Scalar send_sum{0};
    for (int h : g.out_neighbors(i + 1)) send_sum += w.send(i, h - 1);
    Scalar received{0};
    for (int j : g.in_neighbors(i + 1)) received += w.send(j - 1, i) * st.surpluses(j - 1);

    const Scalar gain = w.surplus_gain(i);
    rec.gate(i) = gate;
    rec.neighbor_term(i) = term;
    rec.x_next(i) = st.states(i) + applied + gain * st.surpluses(i);
    // Surplus update with the state change substituted in; every term is
    // nonnegative in the gated algorithm, so s >= 0 is preserved exactly.
    rec.s_next(i) = (Scalar(1) - send_sum - gain) * st.surpluses(i) + received - applied;
  }
  return rec;
}

template <class Scalar>
WeightTables<Scalar> realize_checked(const WeightPolicy<Scalar>& policy, const Digraph& g, long k,
                                     std::optional<long> error_step = std::nullopt) {
  WeightTables<Scalar> w = policy.realize(g, k);
  ValidationReport report = validate_tables(w, g);
  if (!report.ok()) throw WeightError(std::move(report), error_step);
  return w;
}

}  // namespace detail

/// One round of the gated algorithm. Throws WeightError (carrying the
/// validation report) when the weights violate (P1)-(P3) on g.
template <class Scalar>
StepRecord<Scalar> step(const Digraph& g, const WeightPolicy<Scalar>& policy,
                        const NetworkState<Scalar>& st, long k = 0) {
  return detail::step_with_tables(g, detail::realize_checked(policy, g, k), st, k, true);
}

/// One round with the gate forced open for every node (the non-switching
/// baseline used in convergence-time comparisons). Surpluses may go negative.
template <class Scalar>
StepRecord<Scalar> step_baseline(const Digraph& g, const WeightPolicy<Scalar>& policy,
                                 const NetworkState<Scalar>& st, long k = 0) {
  return detail::step_with_tables(g, detail::realize_checked(policy, g, k), st, k, false);
}

template <class Scalar>
struct Trajectory {
  Algorithm algorithm = Algorithm::surplus;
  NetworkState<Scalar> initial;
  std::vector<StepRecord<Scalar>> records;

  long steps() const noexcept { return static_cast<long>(records.size()); }

  /// State at time k; k = 0 is the initial state.
  NetworkState<Scalar> state_at(long k) const {
    if (k < 0 || k > steps()) throw std::invalid_argument("state index out of range");
    if (k == 0) return initial;
    const auto& rec = records[static_cast<std::size_t>(k - 1)];
    return {rec.x_next, rec.s_next};
  }
};

/// Drive `steps` rounds, handing each completed StepRecord to `visit`.
/// `visit` returns false to stop early. Returns the last state reached.
///
/// Weight validation: schedules with a period and a time-constant policy are
/// validated once per phase up front; otherwise every step is validated.
/// Failures throw WeightError with the failing step index attached.
template <class Scalar, class Visitor>
NetworkState<Scalar> run_visit(const TopologySchedule& schedule, const WeightPolicy<Scalar>& policy,
                               const NetworkState<Scalar>& initial, long steps, Algorithm algorithm,
                               Visitor&& visit) {
  const int n = schedule.node_count();
  if (initial.states.size() != n || initial.surpluses.size() != n)
    throw DimensionError("initial state does not match the schedule's node count");
  if ((initial.surpluses.array() < Scalar(0)).any())
    throw std::invalid_argument("initial surpluses must be nonnegative");
  if (steps < 0) throw std::invalid_argument("step count must be >= 0");
  if (const auto len = schedule.length(); len && steps > *len)
    throw std::invalid_argument("scripted schedule of length " + std::to_string(*len) +
                                " cannot run " + std::to_string(steps) + " steps");

  const bool gated = algorithm == Algorithm::surplus;
  const bool cacheable = schedule.kind() != TopologySchedule::Kind::random &&
                         schedule.kind() != TopologySchedule::Kind::scripted &&
                         policy.constant_in_time();

  struct Phase {
    Digraph graph;
    WeightTables<Scalar> tables;
  };
  std::vector<Phase> cache;
  if (cacheable) {
    for (long p = 0; p < schedule.period(); ++p) {
      Digraph g = schedule.graph(p);
      WeightTables<Scalar> w = detail::realize_checked(policy, g, p, p);
      cache.push_back({std::move(g), std::move(w)});
    }
  }

  NetworkState<Scalar> current = initial;
  for (long k = 0; k < steps; ++k) {
    StepRecord<Scalar> rec;
    if (cacheable) {
      const Phase& phase = cache[static_cast<std::size_t>(k % schedule.period())];
      rec = detail::step_with_tables(phase.graph, phase.tables, current, k, gated);
    } else {
      const Digraph g = schedule.graph(k);
      const WeightTables<Scalar> w = detail::realize_checked(policy, g, k, k);
      rec = detail::step_with_tables(g, w, current, k, gated);
    }
    current.states = rec.x_next;
    current.surpluses = rec.s_next;
    if (!visit(std::move(rec))) break;
  }
  return current;
}

/// Run and keep the whole trajectory.
template <class Scalar>
Trajectory<Scalar> run(const TopologySchedule& schedule, const WeightPolicy<Scalar>& policy,
                       const NetworkState<Scalar>& initial, long steps,
                       Algorithm algorithm = Algorithm::surplus) {
  Trajectory<Scalar> trajectory{algorithm, initial, {}};
  trajectory.records.reserve(static_cast<std::size_t>(steps));
  run_visit(schedule, policy, initial, steps, algorithm, [&](StepRecord<Scalar>&& rec) {
    trajectory.records.push_back(std::move(rec));
    return true;
  });
  return trajectory;
}

}  // namespace surplus
