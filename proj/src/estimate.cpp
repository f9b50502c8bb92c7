#include "bayesrank/estimate.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "bayesrank/errors.hpp"
#include "bayesrank/rng.hpp"

namespace bayesrank {

double prediction_risk(const Matrix& b_hat, const Matrix& b_true, const Matrix& X) {
  if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols()) {
    throw DimensionError("b_hat and b_true shapes differ");
  }
  if (X.cols() != b_hat.rows()) throw DimensionError("X columns must equal p");
  return (X * (b_hat - b_true)).squaredNorm();
}

double completion_risk(const Matrix& b_hat, const Matrix& b_true,
                       const std::optional<std::vector<Entry>>& mask) {
  if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols()) {
    throw DimensionError("b_hat and b_true shapes differ");
  }
  if (!mask) return (b_hat - b_true).squaredNorm();
  double total = 0.0;
  for (const auto& e : *mask) {
    if (e.row < 0 || e.row >= b_hat.rows() || e.col < 0 || e.col >= b_hat.cols()) {
      throw DimensionError("mask index out of range");
    }
    const double d = b_hat(e.row, e.col) - b_true(e.row, e.col);
    total += d * d;
  }
  return total;
}

int effective_rank(const Matrix& b_hat, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
  return numerical_rank(b_hat, rel_tol);
}

void Scenario::validate() const {
  if (id.empty()) throw ConfigError("scenario id must be non-empty");
  dims.validate();
  if (k0 < 0 || k0 > dims.k) {
    throw ConfigError("scenario " + id + ": k0 must lie in [0, k]");
  }
  if (design.kind == DesignKind::kIdentity && dims.ell != dims.p) {
    throw ConfigError("scenario " + id + ": identity design needs ell == p");
  }
  if (!(truth_amplitude > 0.0)) throw ConfigError("scenario " + id + ": amplitude must be > 0");
  validate_prior(prior, dims.k);
  sampler.validate();
  if (reps < 2) throw ConfigError("scenario " + id + ": reps must be >= 2");
}

ScenarioFixture make_fixture(const Scenario& scenario, std::uint64_t master_seed) {
  Rng rng(substream_seed(stream_seed(master_seed, scenario.id, 0), "fixture"));
  ScenarioFixture fixture;
  fixture.X = gen_design(scenario.dims.ell, scenario.dims.p, scenario.design, rng);
  fixture.truth = gen_lowrank(scenario.dims.p, scenario.dims.m, scenario.k0,
                              scenario.truth_amplitude, rng);
  return fixture;
}

RegressionInstance make_replicate(const Scenario& scenario,
                                  const ScenarioFixture& fixture,
                                  std::uint64_t rep_seed) {
  Rng rng(substream_seed(rep_seed, "noise"));
  RegressionInstance inst;
  inst.X = fixture.X;
  inst.Y = add_noise(fixture.X * fixture.truth.B, scenario.noise, rng);
  inst.truth = fixture.truth;
  inst.noise = scenario.noise;
  inst.k = scenario.dims.k;
  return inst;
}

std::pair<double, double> mean_and_std_error(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

void parallel_for(int count, int parallelism, const std::function<void(int)>& task) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(parallelism, count));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

MonteCarloRisk monte_carlo_risk(const Scenario& scenario, std::uint64_t master_seed,
                                const MonteCarloOptions& options) {
  scenario.validate();
  const ScenarioFixture fixture = make_fixture(scenario, master_seed);
  auto seed_of = options.rep_seed ? options.rep_seed : [&](int rep) {
    return stream_seed(master_seed, scenario.id, static_cast<std::uint64_t>(rep) + 1);
  };

  const auto reps = static_cast<std::size_t>(scenario.reps);
  MonteCarloRisk out;
  out.risks.assign(reps, 0.0);
  out.kept.assign(reps, 0);
  if (options.side_metric) out.side_metrics.resize(reps);

  parallel_for(scenario.reps, options.parallelism, [&](int rep) {
    try {
      const std::uint64_t seed = seed_of(rep);
      const RegressionInstance inst = make_replicate(scenario, fixture, seed);
      SamplerConfig config = scenario.sampler;
      config.seed = substream_seed(seed, "sampler");
      const ChainResult chain = run_chain(inst, scenario.prior, config);
      const auto r = static_cast<std::size_t>(rep);
      out.risks[r] = prediction_risk(chain.summary.b_hat, fixture.truth.B, fixture.X);
      out.kept[r] = chain.summary.kept;
      if (options.side_metric) out.side_metrics[r] = options.side_metric(inst);
    } catch (const NumericalError& e) {
      throw NumericalError("scenario " + scenario.id + " replication " +
                               std::to_string(rep) + ": " + e.what(),
                           e.condition_estimate());
    } catch (const std::exception& e) {
      throw std::runtime_error("scenario " + scenario.id + " replication " +
                               std::to_string(rep) + ": " + e.what());
    }
  });

  std::tie(out.mean, out.std_error) = mean_and_std_error(out.risks);
  return out;
}

}  // namespace bayesrank
