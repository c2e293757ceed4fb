#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "surplus/graph.hpp"
#include "surplus/matrix_form.hpp"
#include "surplus/protocol.hpp"
#include "surplus/rng.hpp"

#include "instances.hpp"

using namespace surplus;

namespace {

const Digraph kPair(2, {{2, 1}});
const auto kQuarterWeights = WeightPolicy<double>::uniform(0.25, 0.25, 0.25);

BoolVector open_gates(int n) { return BoolVector::Constant(n, true); }

BoolVector gates_from_decisions(const Digraph& g, const WeightPolicy<double>& policy,
                                const VectorX<double>& states) {
  BoolVector gates(g.node_count());
  for (int i = 1; i <= g.node_count(); ++i)
    gates(i - 1) = switching_decision(g, policy, states, i).gate;
  return gates;
}

}  // namespace

TEST_CASE("round matrices of the two-node example") {
  const auto m = build_matrices(kPair, kQuarterWeights, open_gates(2));

  MatrixX<double> state_map(2, 2);
  state_map << 0.75, 0.25, 0.0, 1.0;
  CHECK((MatrixX<double>::Identity(2, 2) - m.laplacian - state_map).cwiseAbs().maxCoeff() < 1e-15);

  MatrixX<double> surplus_update(2, 2);
  surplus_update << 1.0, 0.25, 0.0, 0.75;
  CHECK((m.surplus_update - surplus_update).cwiseAbs().maxCoeff() < 1e-15);

  // The (2,1) block of the stacked system is the laplacian, verbatim.
  CHECK(m.system.block(2, 0, 2, 2) == m.laplacian);
}

TEST_CASE("round matrices of the empty graph") {
  const Digraph empty(3, {});
  const auto m = build_matrices(empty, kQuarterWeights, open_gates(3));
  CHECK(m.laplacian.cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.surplus_update - MatrixX<double>::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.system.topLeftCorner(3, 3) - MatrixX<double>::Identity(3, 3)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((m.system.topRightCorner(3, 3) - m.surplus_gain).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.system.bottomLeftCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);

  const auto report = check_stochasticity(m);
  CHECK(report.max_row_sum_error_state_map == 0.0);
  CHECK(report.max_col_sum_error_surplus_update == 0.0);
  CHECK(report.max_col_sum_error_system == 0.0);
}

TEST_CASE("closed gates zero the adjacency and laplacian") {
  const Digraph g(3, {{1, 2}, {2, 3}, {3, 1}});
  const auto m = build_matrices(g, kQuarterWeights, BoolVector::Constant(3, false));
  CHECK(m.adjacency.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.laplacian.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix step agrees with the agent step on the worked example") {
  NetworkState<double> st;
  st.states = VectorX<double>(2);
  st.states << 0, 1;
  st.surpluses = VectorX<double>(2);
  st.surpluses << 0, 0.4;

  const auto rec = step(kPair, kQuarterWeights, st);
  const auto m =
      build_matrices(kPair, kQuarterWeights, gates_from_decisions(kPair, kQuarterWeights, st.states));
  const auto next = step_matrix(m, st);
  CHECK(next.states(0) == doctest::Approx(0.0));
  CHECK(next.states(1) == doctest::Approx(1.1));
  CHECK(next.surpluses(0) == doctest::Approx(0.1));
  CHECK(next.surpluses(1) == doctest::Approx(0.2));
  CHECK((next.states - rec.x_next).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((next.surpluses - rec.s_next).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix step fixes the consensus point and conserves the total") {
  const auto m = build_matrices(kPair, kQuarterWeights, open_gates(2));
  NetworkState<double> consensus;
  consensus.states = VectorX<double>::Constant(2, 0.3);
  consensus.surpluses = VectorX<double>::Zero(2);
  const auto next = step_matrix(m, consensus);
  CHECK((next.states.array() - 0.3).abs().maxCoeff() < 1e-15);
  CHECK(next.surpluses.cwiseAbs().maxCoeff() < 1e-15);

  NetworkState<double> st;
  st.states = VectorX<double>(2);
  st.states << 4.0, -9.0;
  st.surpluses = VectorX<double>(2);
  st.surpluses << 1.5, 0.25;
  const auto moved = step_matrix(m, st);
  const double before = st.states.sum() + st.surpluses.sum();
  const double after = moved.states.sum() + moved.surpluses.sum();
  CHECK(std::abs(after - before) <= 1e-12 * std::abs(before));
}

TEST_CASE("step_matrix checks dimensions") {
  const auto m = build_matrices(kPair, kQuarterWeights, open_gates(2));
  NetworkState<double> wrong;
  wrong.states = VectorX<double>::Zero(3);
  wrong.surpluses = VectorX<double>::Zero(3);
  CHECK_THROWS_AS(step_matrix(m, wrong), DimensionError);
  CHECK_THROWS_AS(build_matrices(kPair, kQuarterWeights, open_gates(3)), DimensionError);
}

TEST_CASE("stochasticity report flags an injected fault") {
  auto m = build_matrices(kPair, kQuarterWeights, open_gates(2));
  CHECK(check_stochasticity(m).within(1e-12));
  m.surplus_update(0, 1) += 1e-3;
  const auto report = check_stochasticity(m);
  CHECK(report.max_col_sum_error_surplus_update == doctest::Approx(1e-3));
  CHECK_FALSE(report.within(1e-12));
}

TEST_CASE("agent step and matrix step agree on random instances") {
  SplitMix64 rng(808);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const Digraph g = instances::random_digraph(n, rng.next_double(0.1, 0.9), rng);
    const auto policy = instances::random_valid_weights(n, rng);
    const auto st = instances::random_state(n, 50.0, 10.0, rng);

    const auto rec = step(g, policy, st);
    const auto gates = gates_from_decisions(g, policy, st.states);
    CHECK((gates == rec.gate).all());

    const auto m = build_matrices(g, policy, gates);
    CHECK(check_stochasticity(m).within(1e-12));
    const auto next = step_matrix(m, st);
    CHECK((next.states - rec.x_next).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((next.surpluses - rec.s_next).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("with open gates the matrix form is the baseline algorithm") {
  SplitMix64 rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    const Digraph g = instances::random_digraph(n, rng.next_double(0.2, 0.9), rng);
    const auto policy = instances::random_valid_weights(n, rng);
    const auto st = instances::random_state(n, 20.0, 5.0, rng);

    const auto rec = step_baseline(g, policy, st);
    const auto m = build_matrices(g, policy, open_gates(n));
    const auto next = step_matrix(m, st);
    CHECK((next.states - rec.x_next).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((next.surpluses - rec.s_next).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
