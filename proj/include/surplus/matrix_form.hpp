#pragma once

#include <algorithm>
#include <string>

#include "surplus/errors.hpp"
#include "surplus/graph.hpp"
#include "surplus/protocol.hpp"
#include "surplus/types.hpp"

namespace surplus {

/// The block matrices of one synchronous round, used as an independent
/// stepping route against the agent-level implementation.
///
///   adjacency(i-1, j-1) = gate_i * update(i, j)      (zero off the edge set)
///   laplacian          = diag(row sums of adjacency) - adjacency
///   surplus_routing(h-1, i-1) = send(i, h)           (note the transpose)
///   surplus_update     = I - diag(sent totals) + surplus_routing
///   surplus_gain       = diag of the per-node surplus gains
///   system             = [ I - laplacian,  surplus_gain                 ]
///                        [ laplacian,      surplus_update - surplus_gain ]   (2n x 2n)
///
/// I - laplacian is row stochastic, surplus_update is column stochastic, and
/// every column of `system` sums to one; the (2,1) block is the laplacian and
/// may hold negative entries.
template <class Scalar>
struct UpdateMatrices {
  MatrixX<Scalar> adjacency;
  MatrixX<Scalar> laplacian;
  MatrixX<Scalar> surplus_routing;
  MatrixX<Scalar> surplus_update;
  MatrixX<Scalar> surplus_gain;
  MatrixX<Scalar> system;
};

/// Assemble the round matrices for digraph g with the given per-node gates.
/// Gates are an input, not computed here: they depend on the state, and
/// taking them as given keeps the construction a pure function.
template <class Scalar>
UpdateMatrices<Scalar> build_matrices(const Digraph& g, const WeightPolicy<Scalar>& policy,
                                      const BoolVector& gate, long k = 0) {
  const int n = g.node_count();
  if (gate.size() != n) throw DimensionError("gate vector must have length " + std::to_string(n));
  const WeightTables<Scalar> w = detail::realize_checked(policy, g, k);

  UpdateMatrices<Scalar> m;
  m.adjacency = MatrixX<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (gate(i)) m.adjacency.row(i) = w.update.row(i);

  const VectorX<Scalar> degree = m.adjacency.rowwise().sum();
  m.laplacian = MatrixX<Scalar>(degree.asDiagonal()) - m.adjacency;

  m.surplus_routing = w.send.transpose();
  const VectorX<Scalar> sent_totals = w.send.rowwise().sum();
  m.surplus_update = MatrixX<Scalar>::Identity(n, n) - MatrixX<Scalar>(sent_totals.asDiagonal()) +
                     m.surplus_routing;
  m.surplus_gain = MatrixX<Scalar>(w.surplus_gain.asDiagonal());

  m.system = MatrixX<Scalar>(2 * n, 2 * n);
  m.system.topLeftCorner(n, n) = MatrixX<Scalar>::Identity(n, n) - m.laplacian;
  m.system.topRightCorner(n, n) = m.surplus_gain;
  m.system.bottomLeftCorner(n, n) = m.laplacian;
  m.system.bottomRightCorner(n, n) = m.surplus_update - m.surplus_gain;
  return m;
}

/// Apply the stacked one-round map: [x; s] -> system * [x; s].
template <class Scalar>
NetworkState<Scalar> step_matrix(const UpdateMatrices<Scalar>& m, const NetworkState<Scalar>& st) {
  const Eigen::Index n = st.states.size();
  if (st.surpluses.size() != n || m.system.rows() != 2 * n)
    throw DimensionError("matrix and state dimensions disagree");
  VectorX<Scalar> stacked(2 * n);
  stacked << st.states, st.surpluses;
  const VectorX<Scalar> next = m.system * stacked;
  return {next.head(n), next.tail(n)};
}

/// Measured deviations from the stochasticity structure above.
struct StochasticityReport {
  double max_row_sum_error_state_map = 0;       // rows of I - laplacian vs 1
  double max_col_sum_error_surplus_update = 0;  // columns of surplus_update vs 1
  double max_col_sum_error_system = 0;          // columns of system vs 1
  double min_entry_state_map = 0;               // most negative entry of I - laplacian
  double min_entry_surplus_update = 0;

  bool within(double tol) const noexcept {
    return max_row_sum_error_state_map <= tol && max_col_sum_error_surplus_update <= tol &&
           max_col_sum_error_system <= tol && min_entry_state_map >= -tol &&
           min_entry_surplus_update >= -tol;
  }
};

template <class Scalar>
StochasticityReport check_stochasticity(const UpdateMatrices<Scalar>& m) {
  const Eigen::Index n = m.laplacian.rows();
  const MatrixX<Scalar> state_map = MatrixX<Scalar>::Identity(n, n) - m.laplacian;

  StochasticityReport report;
  report.max_row_sum_error_state_map = static_cast<double>(
      (state_map.rowwise().sum().array() - Scalar(1)).abs().maxCoeff());
  report.max_col_sum_error_surplus_update = static_cast<double>(
      (m.surplus_update.colwise().sum().array() - Scalar(1)).abs().maxCoeff());
  report.max_col_sum_error_system = static_cast<double>(
      (m.system.colwise().sum().array() - Scalar(1)).abs().maxCoeff());
  report.min_entry_state_map =
      std::min(0.0, static_cast<double>(state_map.minCoeff()));
  report.min_entry_surplus_update =
      std::min(0.0, static_cast<double>(m.surplus_update.minCoeff()));
  return report;
}

}  // namespace surplus
