#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "surplus/analysis.hpp"
#include "surplus/graph.hpp"
#include "surplus/protocol.hpp"

namespace surplus {

/// Environment variable that, when set, overrides every config's output
/// directory.
inline constexpr const char* kOutputDirEnvVar = "SURPLUS_SIM_OUTPUT_DIR";

struct ConvergenceSpec {
  double threshold = 0.05;
  Norm norm = Norm::linf;
};

/// Initial condition: an explicit state, per-node uniform draws, or the
/// state paired with a counterexample schedule generator.
struct InitialStateSpec {
  struct RandomUniform {
    double low = -50.0;
    double high = 50.0;
    std::uint64_t seed = 0;
  };

  std::optional<NetworkState<double>> explicit_state;
  std::optional<RandomUniform> random;
  bool from_generator = false;
};

struct OutputSpec {
  std::string dir = "out";
  std::string prefix = "run";
};

struct ExperimentConfig {
  TopologySchedule schedule = TopologySchedule::static_graph(Digraph(1, {}));
  std::optional<NetworkState<double>> generator_state;  // paired with counterexample generators
  WeightPolicy<double> weights = WeightPolicy<double>::uniform(0.25, 0.25, 0.25);
  InitialStateSpec initial;
  Algorithm algorithm = Algorithm::surplus;
  long horizon = 1;
  ConvergenceSpec convergence;
  int repetitions = 1;
  OutputSpec output;
  // CLI-only hooks, not part of the JSON schema.
  std::optional<std::string> dump_system_matrix;
  std::optional<std::string> output_dir_override;  // beats env var and config
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Output directory with precedence: CLI override, then the environment
/// variable, then the config file.
std::string resolve_output_dir(const ExperimentConfig& config);

/// Validate the config without running: weights must pass (P1)-(P3) on every
/// distinct graph the schedule produces over the horizon. Throws WeightError
/// or ConfigError; returns normally when the config is runnable.
void validate_config(const ExperimentConfig& config);

struct RepetitionSummary {
  int repetition = 0;
  std::optional<std::uint64_t> seed;  // recorded for random initial states
  bool converged = false;
  std::optional<long> convergence_step;
  double final_dist = 0;
  double wall_time_s = 0;
  std::string trajectory_csv;
  std::string metrics_csv;
};

struct ExperimentSummary {
  std::vector<RepetitionSummary> repetitions;
  std::string summary_path;

  bool all_converged() const;
  nlohmann::json to_json() const;
};

/// Run the configured experiment, writing per-repetition trajectory and
/// metrics CSVs plus one summary JSON under the output directory.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct ComparisonRow {
  int n = 0;
  double mean_steps_surplus = 0;
  double mean_steps_baseline = 0;
  double ratio = 0;  // surplus / baseline
  int converged_surplus = 0;
  int converged_baseline = 0;
  int repetitions = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> warnings;  // one per non-converged repetition

  std::string to_csv() const;  // columns n,mean_steps_surplus,mean_steps_baseline,ratio
};

/// Convergence-time comparison of the gated algorithm against the
/// non-switching baseline. For each n: the dense non-balanced digraph from
/// fig3_family(n), uniform weights a = b = 1/n and surplus gain 1/(2n),
/// repeated runs from states drawn uniformly (range, seed and repetition
/// count from the template config), both algorithms started from the same
/// draw, stopped at the template's convergence threshold or horizon.
/// Non-converged repetitions are excluded from the means with a warning.
ComparisonTable run_comparison(const std::vector<int>& n_list, const ExperimentConfig& templ);

/// Exit codes used by the CLI: one per error class.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitWeightError = 3,
  kExitDimensionError = 4,
  kExitIoError = 5,
};

}  // namespace surplus
