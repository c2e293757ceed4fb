#include "surplus/json_io.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "surplus/errors.hpp"

namespace surplus {

namespace {

const json& require(const json& j, const std::string& key, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(context + "." + key, "missing");
  return *it;
}

double require_number(const json& j, const std::string& key, const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number()) throw ConfigError(context + "." + key, "expected a number");
  return v.get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number_integer()) throw ConfigError(context + "." + key, "expected an integer");
  return v.get<int>();
}

VectorX<double> vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context, "expected an array of numbers");
  VectorX<double> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(context, "entry " + std::to_string(i) + " is not a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

MatrixX<double> matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) throw ConfigError(context, "expected a non-empty array of rows");
  const std::size_t cols = j[0].size();
  MatrixX<double> m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(context, "row " + std::to_string(r) + " has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const VectorX<double>& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const MatrixX<double>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

WeightTables<double> tables_from_json(const json& j, const std::string& context) {
  WeightTables<double> t;
  t.update = matrix_from_json(require(j, "a", context), context + ".a");
  t.send = matrix_from_json(require(j, "b", context), context + ".b");
  t.surplus_gain = vector_from_json(require(j, "eps", context), context + ".eps");
  return t;
}

json tables_to_json(const WeightTables<double>& t) {
  return json{{"a", matrix_to_json(t.update)},
              {"b", matrix_to_json(t.send)},
              {"eps", vector_to_json(t.surplus_gain)}};
}

}  // namespace

json to_json(const Digraph& g) {
  json edges = json::array();
  for (const auto& [from, to] : g.edge_list()) edges.push_back(json::array({from, to}));
  return json{{"n", g.node_count()}, {"edges", std::move(edges)}};
}

Digraph digraph_from_json(const json& j) {
  const int n = require_int(j, "n", "digraph");
  const json& edges_json = require(j, "edges", "digraph");
  if (!edges_json.is_array()) throw ConfigError("digraph.edges", "expected an array of pairs");
  std::vector<Edge> edges;
  edges.reserve(edges_json.size());
  for (const auto& e : edges_json) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ConfigError("digraph.edges", "each edge must be a pair [from, to] of integers");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  try {
    return Digraph(n, edges);
  } catch (const std::invalid_argument& err) {
    throw ConfigError("digraph", err.what());
  }
}

json to_json(const TopologySchedule& schedule) {
  switch (schedule.kind()) {
    case TopologySchedule::Kind::static_graph:
      return json{{"kind", "static"}, {"graph", to_json(schedule.phases().front())}};
    case TopologySchedule::Kind::periodic:
    case TopologySchedule::Kind::scripted: {
      json graphs = json::array();
      for (const auto& g : schedule.phases()) graphs.push_back(to_json(g));
      const char* kind =
          schedule.kind() == TopologySchedule::Kind::periodic ? "periodic" : "scripted";
      return json{{"kind", kind}, {"graphs", std::move(graphs)}};
    }
    case TopologySchedule::Kind::random:
      return json{{"kind", "random"},
                  {"n", schedule.node_count()},
                  {"p", schedule.edge_probability()},
                  {"seed", schedule.seed()}};
  }
  throw std::logic_error("unreachable");
}

TopologySchedule schedule_from_json(const json& j) {
  const json& kind_json = require(j, "kind", "schedule");
  if (!kind_json.is_string()) throw ConfigError("schedule.kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();

  if (kind == "static") return TopologySchedule::static_graph(digraph_from_json(require(j, "graph", "schedule")));

  if (kind == "periodic" || kind == "scripted") {
    const json& graphs_json = require(j, "graphs", "schedule");
    if (!graphs_json.is_array() || graphs_json.empty())
      throw ConfigError("schedule.graphs", "expected a non-empty array of digraphs");
    std::vector<Digraph> graphs;
    graphs.reserve(graphs_json.size());
    for (const auto& g : graphs_json) graphs.push_back(digraph_from_json(g));
    try {
      return kind == "periodic" ? TopologySchedule::periodic(std::move(graphs))
                                : TopologySchedule::scripted(std::move(graphs));
    } catch (const std::invalid_argument& err) {
      throw ConfigError("schedule.graphs", err.what());
    }
  }

  if (kind == "random") {
    const int n = require_int(j, "n", "schedule");
    const double p = require_number(j, "p", "schedule");
    const json& seed_json = require(j, "seed", "schedule");
    if (!seed_json.is_number_unsigned() && !seed_json.is_number_integer())
      throw ConfigError("schedule.seed", "expected an integer");
    try {
      return TopologySchedule::random(n, p, seed_json.get<std::uint64_t>());
    } catch (const std::invalid_argument& err) {
      throw ConfigError("schedule", err.what());
    }
  }

  throw ConfigError("schedule.kind", "unknown kind '" + kind +
                                         "' (expected static, periodic, scripted or random)");
}

json to_json(const NetworkState<double>& st) {
  return json{{"x", vector_to_json(st.states)}, {"s", vector_to_json(st.surpluses)}};
}

NetworkState<double> state_from_json(const json& j) {
  NetworkState<double> st;
  st.states = vector_from_json(require(j, "x", "state"), "state.x");
  if (j.contains("s")) {
    st.surpluses = vector_from_json(j.at("s"), "state.s");
    if (st.surpluses.size() != st.states.size())
      throw ConfigError("state.s", "length differs from state.x");
  } else {
    st.surpluses = VectorX<double>::Zero(st.states.size());
  }
  return st;
}

json to_json(const WeightPolicy<double>& policy) {
  if (policy.mode() == WeightPolicy<double>::Mode::uniform)
    return json{{"mode", "uniform"},
                {"a", policy.uniform_update_weight()},
                {"b", policy.uniform_send_weight()},
                {"eps", policy.uniform_surplus_gain()}};

  json j = json{{"mode", "explicit"}};
  if (policy.constant_tables()) {
    json constant = tables_to_json(*policy.constant_tables());
    j.update(constant);
  }
  if (!policy.keyed_tables().empty()) {
    json steps = json::object();
    for (const auto& [k, tables] : policy.keyed_tables()) steps[std::to_string(k)] = tables_to_json(tables);
    j["steps"] = std::move(steps);
  }
  return j;
}

WeightPolicy<double> policy_from_json(const json& j) {
  const json& mode_json = require(j, "mode", "weights");
  if (!mode_json.is_string()) throw ConfigError("weights.mode", "expected a string");
  const std::string mode = mode_json.get<std::string>();

  if (mode == "uniform")
    return WeightPolicy<double>::uniform(require_number(j, "a", "weights"),
                                         require_number(j, "b", "weights"),
                                         require_number(j, "eps", "weights"));

  if (mode == "explicit") {
    const bool has_constant = j.contains("a") || j.contains("b") || j.contains("eps");
    const bool has_steps = j.contains("steps");
    if (!has_constant && !has_steps)
      throw ConfigError("weights", "explicit mode needs constant tables (a/b/eps) or steps");

    WeightPolicy<double> policy = [&] {
      try {
        if (has_constant) return WeightPolicy<double>::explicit_tables(tables_from_json(j, "weights"));
        return WeightPolicy<double>::explicit_keyed();
      } catch (const DimensionError& err) {
        throw ConfigError("weights", err.what());
      }
    }();

    if (has_steps) {
      const json& steps = j.at("steps");
      if (!steps.is_object()) throw ConfigError("weights.steps", "expected an object keyed by time");
      for (const auto& [key, value] : steps.items()) {
        long k = 0;
        try {
          k = std::stol(key);
        } catch (const std::exception&) {
          throw ConfigError("weights.steps", "key '" + key + "' is not a time index");
        }
        try {
          policy.set_tables_at(k, tables_from_json(value, "weights.steps." + key));
        } catch (const DimensionError& err) {
          throw ConfigError("weights.steps." + key, err.what());
        }
      }
    }
    return policy;
  }

  throw ConfigError("weights.mode", "unknown mode '" + mode + "' (expected uniform or explicit)");
}

}  // namespace surplus
