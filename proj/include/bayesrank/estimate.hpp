#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bayesrank/gibbs.hpp"
#include "bayesrank/matdata.hpp"
#include "bayesrank/priors.hpp"

namespace bayesrank {

/// |X (B_hat - B)|_F^2.
double prediction_risk(const Matrix& b_hat, const Matrix& b_true, const Matrix& X);

/// Squared error over `mask`, or over the whole grid when no mask is given.
double completion_risk(const Matrix& b_hat, const Matrix& b_true,
                       const std::optional<std::vector<Entry>>& mask = std::nullopt);

/// Number of singular values >= rel_tol * sigma_max; 0 for the zero matrix.
int effective_rank(const Matrix& b_hat, double rel_tol);

/// One reduced-rank regression experiment: design and truth are drawn once
/// from the scenario's stream, noise is redrawn per replication.
struct Scenario {
  std::string id;
  Dims dims;
  int k0 = 1;
  DesignSpec design;
  double truth_amplitude = 1.0;
  NoiseSpec noise = NoiseSpec::gaussian(1.0);
  PriorSpec prior = GammaHierPrior{1.0, 1.0};
  SamplerConfig sampler;
  int reps = 2;

  void validate() const;
};

struct ScenarioFixture {
  Matrix X;
  LowRankTruth truth;
};

ScenarioFixture make_fixture(const Scenario& scenario, std::uint64_t master_seed);

/// Regression instance for replication `rep_seed`: fixed X and truth, fresh noise.
RegressionInstance make_replicate(const Scenario& scenario,
                                  const ScenarioFixture& fixture,
                                  std::uint64_t rep_seed);

struct MonteCarloOptions {
  int parallelism = 1;
  // Replication seed; defaults to stream_seed(master, scenario id, rep).
  std::function<std::uint64_t(int rep)> rep_seed;
  // Extra per-replication metrics computed on the same data (e.g. baseline risks).
  std::function<std::vector<double>(const RegressionInstance&)> side_metric;
};

struct MonteCarloRisk {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> risks;
  std::vector<std::vector<double>> side_metrics;  // per replication; empty without a side metric
  std::vector<int> kept;             // kept sweeps per replication
};

/// Mean prediction risk over `scenario.reps` replications with standard error
/// sample_sd / sqrt(reps). Replications run on up to `parallelism` threads and
/// results are stored by replication index, so the outcome does not depend on
/// scheduling. The first failing replication (lowest index) is rethrown.
MonteCarloRisk monte_carlo_risk(const Scenario& scenario, std::uint64_t master_seed,
                                const MonteCarloOptions& options = {});

// mean and sample_sd / sqrt(n) of `values`.
std::pair<double, double> mean_and_std_error(const std::vector<double>& values);

/// Runs `task(i)` for i in [0, count) on at most `parallelism` threads.
/// Exceptions are collected per index; the lowest-index one is rethrown.
void parallel_for(int count, int parallelism, const std::function<void(int)>& task);

}  // namespace bayesrank
