#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bayesrank/bounds.hpp"
#include "bayesrank/estimate.hpp"
#include "bayesrank/serialize.hpp"

namespace bayesrank {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct ExperimentConfig {
  std::vector<Scenario> scenarios;
  std::filesystem::path output_dir = "out";
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  Json echo;  // the parsed document, echoed into the manifest
};

/// Parses and validates a whole config: every scenario against every module
/// precondition, and scenario ids for uniqueness.
ExperimentConfig parse_experiment_config(const Json& j);
Scenario parse_scenario(const Json& j);

/// One line of the results CSV.
struct ResultRow {
  std::string scenario_id;
  Dims dims;
  int k0 = 0;
  double s2 = 0.0;
  double lambda = 0.0;
  int reps = 0;
  double mean_risk = 0.0;
  double se_risk = 0.0;
  double bound_thm1 = 0.0;
  double bound_remark1 = 0.0;
  double bound_ratio = 0.0;
};

std::string results_csv_header();
std::string format_result_row(const ResultRow& row);

/// Everything computed for one scenario of an experiment.
struct ScenarioOutcome {
  ResultRow bayes;
  ResultRow oracle_rank;     // reduced-rank fit at the true rank k0
  ResultRow rank_penalized;  // rank selection with the default penalty
  MonteCarloRisk mc;
  std::vector<double> oracle_rank_risks;
  std::vector<double> rank_penalized_risks;
  BoundBreakdown thm1;
};

// Entry bound C used by the bounded-design simplification for this design.
double design_entry_bound(const Scenario& scenario, const Matrix& X);

ScenarioOutcome evaluate_scenario(const Scenario& scenario, std::uint64_t master_seed,
                                  int parallelism);

struct RunOptions {
  bool force = false;
};

struct ExperimentReport {
  std::vector<ScenarioOutcome> outcomes;
  std::vector<std::string> failures;  // "scenario_id: message"
  std::filesystem::path results_csv;
};

/// Runs every scenario, writes results.csv, baseline_results.csv and
/// manifest.json under the output dir. A failing scenario is recorded and the
/// rest continue. Refuses to reuse an output dir with a manifest unless forced.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// One instance JSON per (scenario, replication) under <output>/instances,
/// identical to the data the experiment would fit.
std::vector<std::filesystem::path> run_generate(const ExperimentConfig& config,
                                                const RunOptions& options);

/// Baseline-only pass over a config; writes baseline_results.csv.
ExperimentReport run_baseline(const ExperimentConfig& config, const RunOptions& options);

struct FitOptions {
  Json prior = Json{{"type", "gamma_hier"}, {"a", 1.0}, {"b", "theorem"}};
  Json lambda = "theorem";
  int iters = 1000;
  std::optional<int> burn_in;
  int thin = 1;
  std::uint64_t seed = 0;
  InitKind init = InitKind::kSvdWarmstart;
  double rank_tol = 1e-2;
};

struct FitOutput {
  Json summary;  // summary_to_json plus risk and effective_rank
  ChainTrace trace;
};

FitOutput fit_instance(const Instance& instance, const FitOptions& options);

}  // namespace bayesrank
