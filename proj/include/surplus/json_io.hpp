#pragma once

#include <nlohmann/json_fwd.hpp>

#include "surplus/graph.hpp"
#include "surplus/protocol.hpp"

namespace surplus {

using nlohmann::json;

// Digraph: {"n": int, "edges": [[from, to], ...]}
json to_json(const Digraph& g);
Digraph digraph_from_json(const json& j);

// TopologySchedule:
//   {"kind": "static",   "graph": Digraph}
//   {"kind": "periodic", "graphs": [Digraph, ...]}
//   {"kind": "scripted", "graphs": [Digraph, ...]}
//   {"kind": "random",   "n": int, "p": real, "seed": uint}
json to_json(const TopologySchedule& schedule);
TopologySchedule schedule_from_json(const json& j);

// NetworkState: {"x": [reals], "s": [reals]}
json to_json(const NetworkState<double>& st);
NetworkState<double> state_from_json(const json& j);

// WeightPolicy:
//   {"mode": "uniform",  "a": real, "b": real, "eps": real}
//   {"mode": "explicit", "a": [[...]], "b": [[...]], "eps": [...],
//    "steps": {"<k>": {"a": ..., "b": ..., "eps": ...}, ...}}   (steps optional;
//    per-step tables override the constant ones at exactly that k)
json to_json(const WeightPolicy<double>& policy);
WeightPolicy<double> policy_from_json(const json& j);

}  // namespace surplus
