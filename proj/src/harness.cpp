#include "surplus/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "surplus/io.hpp"
#include "surplus/json_io.hpp"
#include "surplus/matrix_form.hpp"
#include "surplus/rng.hpp"
#include "surplus/topologies.hpp"

namespace surplus {

namespace {

using nlohmann::json;

void check_known_keys(const json& j, const std::set<std::string>& known,
                      const std::string& context) {
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError(context + "." + key, "unknown field");
}

std::pair<TopologySchedule, std::optional<NetworkState<double>>> schedule_from_config(
    const json& j) {
  if (!j.is_object()) throw ConfigError("schedule", "expected an object");
  if (!j.contains("generator")) return {schedule_from_json(j), std::nullopt};

  const json& name_json = j.at("generator");
  if (!name_json.is_string()) throw ConfigError("schedule.generator", "expected a string");
  const std::string name = name_json.get<std::string>();

  auto require_int_field = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw ConfigError(std::string("schedule.") + key,
                        "generator '" + name + "' needs integer field '" + key + "'");
    return j.at(key).get<int>();
  };
  auto optional_double = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("schedule.") + key, "expected a number");
    return j.at(key).get<double>();
  };

  try {
    if (name == "periodic_ring_4") return {periodic_ring_4(), std::nullopt};
    if (name == "fig3_family")
      return {TopologySchedule::static_graph(fig3_family(require_int_field("n"))), std::nullopt};
    if (name == "counterexample_two_components") {
      auto instance = counterexample_two_components(require_int_field("n1"), require_int_field("n2"),
                                                    optional_double("a", 1.0),
                                                    optional_double("b", -1.0));
      return {std::move(instance.schedule), std::move(instance.initial)};
    }
    if (name == "counterexample_reachable_only") {
      auto instance = counterexample_reachable_only(require_int_field("n"), require_int_field("r"),
                                                    optional_double("a", 1.0),
                                                    optional_double("b", -1.0));
      return {std::move(instance.schedule), std::move(instance.initial)};
    }
    if (name == "random") {
      if (!j.contains("p") || !j.at("p").is_number())
        throw ConfigError("schedule.p", "generator 'random' needs number field 'p'");
      if (!j.contains("seed") || !j.at("seed").is_number_integer())
        throw ConfigError("schedule.seed", "generator 'random' needs integer field 'seed'");
      return {random_schedule(require_int_field("n"), j.at("p").get<double>(),
                              j.at("seed").get<std::uint64_t>()),
              std::nullopt};
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError("schedule", err.what());
  }
  throw ConfigError("schedule.generator", "unknown generator '" + name + "'");
}

InitialStateSpec initial_from_config(const json& j) {
  InitialStateSpec spec;
  if (j.is_string()) {
    if (j.get<std::string>() != "generator")
      throw ConfigError("initial_state", "string form must be \"generator\"");
    spec.from_generator = true;
    return spec;
  }
  if (!j.is_object()) throw ConfigError("initial_state", "expected an object or \"generator\"");

  if (j.contains("random")) {
    check_known_keys(j, {"random"}, "initial_state");
    const json& r = j.at("random");
    check_known_keys(r, {"low", "high", "seed"}, "initial_state.random");
    InitialStateSpec::RandomUniform random;
    if (r.contains("low")) random.low = r.at("low").get<double>();
    if (r.contains("high")) random.high = r.at("high").get<double>();
    if (!r.contains("seed") || !r.at("seed").is_number_integer())
      throw ConfigError("initial_state.random.seed", "a seed is required");
    random.seed = r.at("seed").get<std::uint64_t>();
    if (!(random.low < random.high))
      throw ConfigError("initial_state.random", "low must be < high");
    spec.random = random;
    return spec;
  }

  spec.explicit_state = state_from_json(j);
  if ((spec.explicit_state->surpluses.array() < 0.0).any())
    throw ConfigError("initial_state.s", "initial surpluses must be nonnegative");
  return spec;
}

Norm norm_from_string(const std::string& s, const std::string& context) {
  if (s == "l1") return Norm::l1;
  if (s == "linf") return Norm::linf;
  throw ConfigError(context, "unknown norm '" + s + "' (expected l1 or linf)");
}

std::string rep_tag(const ExperimentConfig& config, int rep) {
  if (config.repetitions == 1) return config.output.prefix;
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "_rep%03d", rep);
  return config.output.prefix + buffer;
}

/// Initial state for one repetition, plus the recorded seed when drawn.
std::pair<NetworkState<double>, std::optional<std::uint64_t>> initial_state_for(
    const ExperimentConfig& config, int rep) {
  const int n = config.schedule.node_count();
  if (config.initial.explicit_state) {
    if (config.initial.explicit_state->states.size() != n)
      throw DimensionError("initial_state.x has length " +
                           std::to_string(config.initial.explicit_state->states.size()) +
                           " but the schedule has " + std::to_string(n) + " nodes");
    return {*config.initial.explicit_state, std::nullopt};
  }
  if (config.initial.random) {
    const auto& spec = *config.initial.random;
    const std::uint64_t rep_seed =
        SplitMix64::substream_seed(spec.seed, static_cast<std::uint64_t>(rep));
    SplitMix64 rng(rep_seed);
    NetworkState<double> st;
    st.states.resize(n);
    for (int i = 0; i < n; ++i) st.states(i) = rng.next_double(spec.low, spec.high);
    st.surpluses = VectorX<double>::Zero(n);
    return {std::move(st), rep_seed};
  }
  if (!config.generator_state)
    throw ConfigError("initial_state", "no state given and the schedule has no paired one");
  if (config.generator_state->states.size() != n)
    throw DimensionError("generator-paired state does not match the schedule");
  return {*config.generator_state, std::nullopt};
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& config) {
  if (config.output_dir_override) return *config.output_dir_override;
  if (const char* env = std::getenv(kOutputDirEnvVar); env && *env) return env;
  return config.output.dir;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  check_known_keys(j,
                   {"schedule", "weights", "initial_state", "algorithm", "horizon", "convergence",
                    "repetitions", "output"},
                   "config");

  ExperimentConfig config;
  if (!j.contains("schedule")) throw ConfigError("schedule", "missing");
  auto [schedule, generator_state] = schedule_from_config(j.at("schedule"));
  config.schedule = std::move(schedule);
  config.generator_state = std::move(generator_state);

  if (!j.contains("weights")) throw ConfigError("weights", "missing");
  config.weights = policy_from_json(j.at("weights"));

  if (j.contains("initial_state")) {
    config.initial = initial_from_config(j.at("initial_state"));
  } else if (config.generator_state) {
    config.initial.from_generator = true;
  } else {
    throw ConfigError("initial_state", "missing (and the schedule pairs no state)");
  }
  if (config.initial.from_generator && !config.generator_state)
    throw ConfigError("initial_state", "\"generator\" given but the schedule pairs no state");

  if (j.contains("algorithm")) {
    const std::string alg = j.at("algorithm").is_string() ? j.at("algorithm").get<std::string>() : "";
    if (alg == "surplus")
      config.algorithm = Algorithm::surplus;
    else if (alg == "baseline")
      config.algorithm = Algorithm::baseline;
    else
      throw ConfigError("algorithm", "expected \"surplus\" or \"baseline\"");
  }

  if (!j.contains("horizon") || !j.at("horizon").is_number_integer())
    throw ConfigError("horizon", "an integer horizon is required");
  config.horizon = j.at("horizon").get<long>();
  if (config.horizon < 1) throw ConfigError("horizon", "must be >= 1");

  if (!j.contains("convergence")) throw ConfigError("convergence", "missing");
  const json& conv = j.at("convergence");
  check_known_keys(conv, {"threshold", "norm"}, "convergence");
  if (!conv.contains("threshold") || !conv.at("threshold").is_number())
    throw ConfigError("convergence.threshold", "a numeric threshold is required");
  config.convergence.threshold = conv.at("threshold").get<double>();
  if (!(config.convergence.threshold > 0)) throw ConfigError("convergence.threshold", "must be > 0");
  if (!conv.contains("norm") || !conv.at("norm").is_string())
    throw ConfigError("convergence.norm", "expected \"l1\" or \"linf\"");
  config.convergence.norm = norm_from_string(conv.at("norm").get<std::string>(), "convergence.norm");

  if (j.contains("repetitions")) {
    if (!j.at("repetitions").is_number_integer())
      throw ConfigError("repetitions", "expected an integer");
    config.repetitions = j.at("repetitions").get<int>();
    if (config.repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  }

  if (j.contains("output")) {
    const json& out = j.at("output");
    check_known_keys(out, {"dir", "prefix"}, "output");
    if (out.contains("dir")) config.output.dir = out.at("dir").get<std::string>();
    if (out.contains("prefix")) config.output.prefix = out.at("prefix").get<std::string>();
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ConfigError("config", "parse error in '" + path + "': " + err.what());
  }
  return config_from_json(j);
}

void validate_config(const ExperimentConfig& config) {
  // Every repetition's initial state must be constructible.
  for (int rep = 0; rep < config.repetitions; ++rep) (void)initial_state_for(config, rep);
  if (const auto len = config.schedule.length(); len && config.horizon > *len)
    throw ConfigError("horizon", "exceeds the scripted schedule length " + std::to_string(*len));

  // Weights must hold on every distinct graph over the horizon.
  switch (config.schedule.kind()) {
    case TopologySchedule::Kind::static_graph:
    case TopologySchedule::Kind::periodic:
    case TopologySchedule::Kind::scripted: {
      const long phases = std::min<long>(config.schedule.period(), config.horizon);
      for (long k = 0; k < phases; ++k) {
        ValidationReport report = validate_weights(config.weights, config.schedule.graph(k), k);
        if (!report.ok()) throw WeightError(std::move(report), k);
      }
      break;
    }
    case TopologySchedule::Kind::random: {
      for (long k = 0; k < config.horizon; ++k) {
        ValidationReport report = validate_weights(config.weights, config.schedule.graph(k), k);
        if (!report.ok()) throw WeightError(std::move(report), k);
      }
      break;
    }
  }
}

bool ExperimentSummary::all_converged() const {
  for (const auto& rep : repetitions)
    if (!rep.converged) return false;
  return !repetitions.empty();
}

json ExperimentSummary::to_json() const {
  json reps = json::array();
  for (const auto& rep : repetitions) {
    json r{{"repetition", rep.repetition},
           {"converged", rep.converged},
           {"final_dist", rep.final_dist},
           {"wall_time_s", rep.wall_time_s},
           {"trajectory_csv", rep.trajectory_csv},
           {"metrics_csv", rep.metrics_csv}};
    r["convergence_step"] = rep.convergence_step ? json(*rep.convergence_step) : json(nullptr);
    r["seed"] = rep.seed ? json(*rep.seed) : json(nullptr);
    reps.push_back(std::move(r));
  }
  json j{{"converged", all_converged()}, {"repetitions", std::move(reps)}};
  if (repetitions.size() == 1) {
    j["convergence_step"] =
        repetitions[0].convergence_step ? json(*repetitions[0].convergence_step) : json(nullptr);
    j["final_dist"] = repetitions[0].final_dist;
    j["wall_time_s"] = repetitions[0].wall_time_s;
  }
  return j;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const std::filesystem::path dir = resolve_output_dir(config);

  ExperimentSummary summary;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    auto [initial, seed] = initial_state_for(config, rep);
    const double average = conserved_average(initial);

    const auto start = std::chrono::steady_clock::now();
    Trajectory<double> trajectory =
        run(config.schedule, config.weights, initial, config.horizon, config.algorithm);
    const auto stop = std::chrono::steady_clock::now();

    RepetitionSummary rs;
    rs.repetition = rep;
    rs.seed = seed;
    rs.wall_time_s = std::chrono::duration<double>(stop - start).count();
    rs.convergence_step =
        convergence_time(trajectory, average, config.convergence.threshold, config.convergence.norm);
    rs.converged = rs.convergence_step.has_value();
    rs.final_dist = consensus_distance(trajectory.state_at(trajectory.steps()), average,
                                       config.convergence.norm);

    const std::string tag = rep_tag(config, rep);
    const auto trajectory_path = dir / (tag + "_trajectory.csv");
    const auto metrics_path = dir / (tag + "_metrics.csv");
    write_file_atomic(trajectory_path, trajectory_csv(trajectory));
    write_file_atomic(metrics_path, metrics_csv(trajectory_metrics(trajectory)));
    rs.trajectory_csv = trajectory_path.string();
    rs.metrics_csv = metrics_path.string();

    if (rep == 0 && config.dump_system_matrix) {
      std::string dump;
      for (long k = 0; k < trajectory.steps(); ++k) {
        const auto matrices =
            build_matrices(config.schedule.graph(k), config.weights,
                           trajectory.records[static_cast<std::size_t>(k)].gate, k);
        dump += matrix_csv(matrices.system);
      }
      write_file_atomic(dir / *config.dump_system_matrix, dump);
    }

    summary.repetitions.push_back(std::move(rs));
  }

  const auto summary_path = dir / (config.output.prefix + "_summary.json");
  write_file_atomic(summary_path, summary.to_json().dump(2) + "\n");
  summary.summary_path = summary_path.string();
  return summary;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "n,mean_steps_surplus,mean_steps_baseline,ratio\n";
  for (const auto& row : rows)
    out << row.n << "," << format_double(row.mean_steps_surplus) << ","
        << format_double(row.mean_steps_baseline) << "," << format_double(row.ratio) << "\n";
  return out.str();
}

ComparisonTable run_comparison(const std::vector<int>& n_list, const ExperimentConfig& templ) {
  if (!templ.initial.random)
    throw ConfigError("initial_state", "comparison runs need a random initial-state spec");
  const auto& draw = *templ.initial.random;

  ComparisonTable table;
  for (const int n : n_list) {
    if (n < 3) throw ConfigError("n", "comparison digraphs need n >= 3");
    const TopologySchedule schedule = TopologySchedule::static_graph(fig3_family(n));
    const auto policy =
        WeightPolicy<double>::uniform(1.0 / n, 1.0 / n, 1.0 / (2.0 * n));
    ValidationReport report = validate_weights(policy, schedule.graph(0));
    if (!report.ok()) throw WeightError(std::move(report), 0);

    ComparisonRow row;
    row.n = n;
    row.repetitions = templ.repetitions;
    double total_surplus = 0;
    double total_baseline = 0;

    for (int rep = 0; rep < templ.repetitions; ++rep) {
      const std::uint64_t rep_seed = SplitMix64::substream_seed(
          SplitMix64::substream_seed(draw.seed, static_cast<std::uint64_t>(n)),
          static_cast<std::uint64_t>(rep));
      SplitMix64 rng(rep_seed);
      NetworkState<double> initial;
      initial.states.resize(n);
      for (int i = 0; i < n; ++i) initial.states(i) = rng.next_double(draw.low, draw.high);
      initial.surpluses = VectorX<double>::Zero(n);
      const double average = conserved_average(initial);

      for (const Algorithm algorithm : {Algorithm::surplus, Algorithm::baseline}) {
        std::optional<long> steps;
        if (consensus_distance(initial, average, templ.convergence.norm) <
            templ.convergence.threshold) {
          steps = 0;
        } else {
          run_visit(schedule, policy, initial, templ.horizon, algorithm,
                    [&](StepRecord<double>&& rec) {
                      const NetworkState<double> st{std::move(rec.x_next), std::move(rec.s_next)};
                      if (consensus_distance(st, average, templ.convergence.norm) <
                          templ.convergence.threshold) {
                        steps = rec.k + 1;
                        return false;
                      }
                      return true;
                    });
        }
        const char* name = algorithm == Algorithm::surplus ? "surplus" : "baseline";
        if (!steps) {
          table.warnings.push_back("n=" + std::to_string(n) + " rep=" + std::to_string(rep) + " " +
                                   name + " did not converge within " +
                                   std::to_string(templ.horizon) + " steps");
          continue;
        }
        if (algorithm == Algorithm::surplus) {
          total_surplus += static_cast<double>(*steps);
          ++row.converged_surplus;
        } else {
          total_baseline += static_cast<double>(*steps);
          ++row.converged_baseline;
        }
      }
    }

    row.mean_steps_surplus =
        row.converged_surplus > 0 ? total_surplus / row.converged_surplus : std::nan("");
    row.mean_steps_baseline =
        row.converged_baseline > 0 ? total_baseline / row.converged_baseline : std::nan("");
    row.ratio = row.mean_steps_surplus / row.mean_steps_baseline;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace surplus
