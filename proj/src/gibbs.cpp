#include "bayesrank/gibbs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "bayesrank/errors.hpp"

namespace bayesrank {

void SamplerConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (iters < 1) throw ConfigError("iters must be >= 1");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  const int burn = resolved_burn_in();
  if (burn < 0 || burn >= iters) throw ConfigError("burn_in must lie in [0, iters)");
  if (expected_kept() < 1) throw ConfigError("configuration keeps no sweeps");
}

void ChainTrace::write_csv(std::ostream& out) const {
  const Eigen::Index k = records.empty() ? 0 : records.front().gamma.size();
  out << "sweep,residual_fro_sq,log_pseudo_posterior";
  for (Eigen::Index j = 1; j <= k; ++j) out << ",gamma_" << j;
  for (Eigen::Index j = 1; j <= k; ++j) out << ",colnorm_" << j;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << r.sweep << ',' << r.residual_fro_sq << ',' << r.log_pseudo_posterior;
    for (Eigen::Index j = 0; j < r.gamma.size(); ++j) out << ',' << r.gamma(j);
    for (Eigen::Index j = 0; j < r.colnorm.size(); ++j) out << ',' << r.colnorm(j);
    out << '\n';
  }
  out.precision(old_precision);
}

Vector GaussianConditional::mean() const { return precision.llt().solve(rhs); }

double regression_fit(const FactorState& state, const RegressionInstance& inst) {
  if (state.M.rows() != inst.X.cols() || state.N.rows() != inst.Y.cols() ||
      state.M.cols() != state.N.cols()) {
    throw DimensionError("factor state does not match the regression instance");
  }
  return (inst.Y - inst.X * (state.M * state.N.transpose())).squaredNorm();
}

double completion_fit(const FactorState& state, const CompletionInstance& inst) {
  if (state.M.rows() != inst.ell || state.N.rows() != inst.m ||
      state.M.cols() != state.N.cols()) {
    throw DimensionError("factor state does not match the completion instance");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < inst.mask.size(); ++t) {
    const auto& e = inst.mask[t];
    const double r = inst.observed(static_cast<Eigen::Index>(t)) -
                     state.M.row(e.row).dot(state.N.row(e.col));
    total += r * r;
  }
  return total;
}

double log_pseudo_posterior(const FactorState& state,
                            const RegressionInstance& inst, double lambda,
                            const PriorSpec& prior) {
  const double fit = regression_fit(state, inst);
  return -lambda * fit + log_prior(state, prior);
}

double log_pseudo_posterior(const FactorState& state,
                            const CompletionInstance& inst, double lambda,
                            const PriorSpec& prior) {
  const double fit = completion_fit(state, inst);
  return -lambda * fit + log_prior(state, prior);
}

GaussianConditional conditional_m(const Matrix& N, const RegressionStats& stats,
                                  double lambda, const Vector& prec_m) {
  const Eigen::Index p = stats.xtx.rows();
  const Eigen::Index k = N.cols();
  const Matrix ntn = N.transpose() * N;
  GaussianConditional cond;
  cond.precision.resize(p * k, p * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = 0; l < k; ++l) {
      cond.precision.block(j * p, l * p, p, p) = (2.0 * lambda * ntn(j, l)) * stats.xtx;
    }
    cond.precision.block(j * p, j * p, p, p).diagonal().array() += prec_m(j);
  }
  const Matrix rhs = (2.0 * lambda) * (stats.xty * N);
  cond.rhs = Eigen::Map<const Vector>(rhs.data(), rhs.size());
  return cond;
}

RowConditionals conditional_n(const Matrix& M, const RegressionStats& stats,
                              double lambda, const Vector& prec_n) {
  RowConditionals cond;
  // A^T A = M^T X^T X M and A^T Y = M^T X^T Y with A = X M.
  cond.precision = (2.0 * lambda) * (M.transpose() * stats.xtx * M);
  cond.precision.diagonal() += prec_n;
  cond.rhs = (2.0 * lambda) * (M.transpose() * stats.xty);
  return cond;
}

namespace {

double condition_estimate(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Vector& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

Eigen::LLT<Matrix> factor_spd(const Matrix& precision) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() == Eigen::Success) return llt;
  const double diag_mean = precision.diagonal().mean();
  for (double jitter : {1e-12, 1e-9, 1e-6}) {
    Matrix bumped = precision;
    bumped.diagonal().array() += jitter * diag_mean;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt;
  }
  const double cond = condition_estimate(precision);
  throw NumericalError("conditional precision is not positive definite (condition estimate " +
                           std::to_string(cond) + ")",
                       cond);
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

// mean + L^{-T} z, where L L^T = precision.
Vector draw_from_factor(const Eigen::LLT<Matrix>& llt, const Vector& rhs, Rng& rng) {
  Vector x = llt.solve(rhs);
  x += llt.matrixU().solve(standard_normal(rhs.size(), rng));
  return x;
}

}  // namespace

Vector draw_gaussian(const GaussianConditional& cond, Rng& rng) {
  return draw_from_factor(factor_spd(cond.precision), cond.rhs, rng);
}

namespace {

Matrix update_m(const FactorState& state, const RegressionStats& stats,
                double lambda, const PriorSpec& prior, Rng& rng) {
  const auto cond =
      conditional_m(state.N, stats, lambda, prior_precision_m(state, prior));
  const Vector v = draw_gaussian(cond, rng);
  return Eigen::Map<const Matrix>(v.data(), state.M.rows(), state.M.cols());
}

Matrix update_n(const FactorState& state, const RegressionStats& stats,
                double lambda, const PriorSpec& prior, Rng& rng) {
  const auto cond =
      conditional_n(state.M, stats, lambda, prior_precision_n(state, prior));
  const auto llt = factor_spd(cond.precision);
  Matrix N(stats.xty.cols(), state.M.cols());
  for (Eigen::Index i = 0; i < N.rows(); ++i) {
    N.row(i) = draw_from_factor(llt, cond.rhs.col(i), rng).transpose();
  }
  return N;
}

void check_state(const FactorState& state, const Dims& d) {
  if (state.M.rows() != d.p || state.N.rows() != d.m || state.M.cols() != d.k ||
      state.N.cols() != d.k) {
    throw DimensionError("factor state shape does not match instance dims");
  }
}

}  // namespace

Matrix cond_update_m(const FactorState& state, const RegressionInstance& inst,
                     double lambda, const PriorSpec& prior, Rng& rng) {
  check_state(state, inst.dims());
  return update_m(state, RegressionStats(inst), lambda, prior, rng);
}

Matrix cond_update_n(const FactorState& state, const RegressionInstance& inst,
                     double lambda, const PriorSpec& prior, Rng& rng) {
  check_state(state, inst.dims());
  return update_n(state, RegressionStats(inst), lambda, prior, rng);
}

Vector cond_update_gamma(const FactorState& state, double a, double b, Rng& rng) {
  const double shape =
      a + 0.5 * static_cast<double>(state.M.rows() + state.N.rows());
  Vector gamma(state.M.cols());
  for (Eigen::Index j = 0; j < gamma.size(); ++j) {
    const double rate =
        b + 0.5 * (state.M.col(j).squaredNorm() + state.N.col(j).squaredNorm());
    std::gamma_distribution<double> precision(shape, 1.0 / rate);
    gamma(j) = std::max(1.0 / precision(rng), kGammaFloor);
  }
  return gamma;
}

namespace {

// Observed (index, value) pairs grouped by row and by column.
struct MaskIndex {
  std::vector<std::vector<std::pair<int, double>>> by_row;
  std::vector<std::vector<std::pair<int, double>>> by_col;

  explicit MaskIndex(const CompletionInstance& inst)
      : by_row(static_cast<std::size_t>(inst.ell)),
        by_col(static_cast<std::size_t>(inst.m)) {
    for (std::size_t t = 0; t < inst.mask.size(); ++t) {
      const auto& e = inst.mask[t];
      const double y = inst.observed(static_cast<Eigen::Index>(t));
      by_row[static_cast<std::size_t>(e.row)].emplace_back(e.col, y);
      by_col[static_cast<std::size_t>(e.col)].emplace_back(e.row, y);
    }
  }
};

// Redraw every row of `target` given the other factor's rows.
Matrix masked_rows_update(const std::vector<std::vector<std::pair<int, double>>>& groups,
                          const Matrix& other, double lambda, const Vector& prec,
                          Rng& rng) {
  const Eigen::Index k = other.cols();
  Matrix out(static_cast<Eigen::Index>(groups.size()), k);
  GaussianConditional cond;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    cond.precision = Matrix::Zero(k, k);
    cond.rhs = Vector::Zero(k);
    for (const auto& [j, y] : groups[i]) {
      const auto row = other.row(j);
      cond.precision.noalias() += row.transpose() * row;
      cond.rhs += y * row.transpose();
    }
    cond.precision *= 2.0 * lambda;
    cond.rhs *= 2.0 * lambda;
    cond.precision.diagonal() += prec;
    out.row(static_cast<Eigen::Index>(i)) = draw_gaussian(cond, rng).transpose();
  }
  return out;
}

std::pair<Matrix, Matrix> completion_update(const FactorState& state,
                                            const MaskIndex& index, double lambda,
                                            const PriorSpec& prior, Rng& rng) {
  Matrix M = masked_rows_update(index.by_row, state.N, lambda,
                                prior_precision_m(state, prior), rng);
  Matrix N = masked_rows_update(index.by_col, M, lambda,
                                prior_precision_n(state, prior), rng);
  return {std::move(M), std::move(N)};
}

}  // namespace

std::pair<Matrix, Matrix> cond_update_completion(const FactorState& state,
                                                 const CompletionInstance& inst,
                                                 double lambda,
                                                 const PriorSpec& prior,
                                                 Rng& rng) {
  inst.validate();
  check_state(state, inst.dims());
  return completion_update(state, MaskIndex(inst), lambda, prior, rng);
}

namespace {

FactorState warmstart_from(const Matrix& target, const PriorSpec& prior, int k) {
  Eigen::JacobiSVD<Matrix> svd(target, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = std::min<Eigen::Index>(k, svd.singularValues().size());
  FactorState state;
  state.M = Matrix::Zero(target.rows(), k);
  state.N = Matrix::Zero(target.cols(), k);
  for (Eigen::Index j = 0; j < r; ++j) {
    const double root = std::sqrt(svd.singularValues()(j));
    state.M.col(j) = root * svd.matrixU().col(j);
    state.N.col(j) = root * svd.matrixV().col(j);
  }
  if (is_hierarchical(prior)) {
    const double per_entry = static_cast<double>(target.rows() + target.cols());
    state.gamma.resize(k);
    for (int j = 0; j < k; ++j) {
      state.gamma(j) = std::max(
          (state.M.col(j).squaredNorm() + state.N.col(j).squaredNorm()) / per_entry,
          kGammaFloor);
    }
  }
  return state;
}

}  // namespace

FactorState initial_state(const RegressionInstance& inst, const PriorSpec& prior,
                          const SamplerConfig& config, Rng& rng) {
  if (config.init == InitKind::kPriorDraw) return sample_prior(prior, inst.dims(), rng);
  return warmstart_from(pseudo_inverse(inst.X) * inst.Y, prior, inst.k);
}

FactorState initial_state(const CompletionInstance& inst, const PriorSpec& prior,
                          const SamplerConfig& config, Rng& rng) {
  if (config.init == InitKind::kPriorDraw) return sample_prior(prior, inst.dims(), rng);
  Matrix filled = Matrix::Zero(inst.ell, inst.m);
  for (std::size_t t = 0; t < inst.mask.size(); ++t) {
    filled(inst.mask[t].row, inst.mask[t].col) =
        inst.observed(static_cast<Eigen::Index>(t));
  }
  return warmstart_from(filled, prior, inst.k);
}

namespace {

TraceRecord make_record(int sweep, const FactorState& state, const PriorSpec& prior,
                        double fit, double lambda) {
  TraceRecord rec;
  rec.sweep = sweep;
  rec.residual_fro_sq = fit;
  rec.log_pseudo_posterior = -lambda * fit + log_prior(state, prior);
  if (const auto* f = std::get_if<FixedPrior>(&prior)) {
    rec.gamma = f->var_m;
  } else {
    rec.gamma = state.gamma;
  }
  rec.colnorm = state.M.colwise().squaredNorm().transpose() +
                state.N.colwise().squaredNorm().transpose();
  return rec;
}

// Systematic-scan driver shared by both models. `factor_step` redraws (M, N);
// `fit` evaluates the data term of the current state.
template <typename Instance, typename FactorStep, typename Fit>
ChainResult drive_chain(const Instance& inst, const PriorSpec& prior,
                        const SamplerConfig& config, FactorStep factor_step, Fit fit) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  FactorState state = initial_state(inst, prior, config, rng);
  const int burn = config.resolved_burn_in();
  const auto* hier = std::get_if<GammaHierPrior>(&prior);

  ChainResult result;
  result.trace.records.reserve(static_cast<std::size_t>(config.expected_kept()));
  Matrix sum = Matrix::Zero(state.M.rows(), state.N.rows());
  int kept = 0;
  for (int sweep = 1; sweep <= config.iters; ++sweep) {
    try {
      factor_step(state, rng);
      if (hier) state.gamma = cond_update_gamma(state, hier->a, hier->b, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("sweep " + std::to_string(sweep) + ": " + e.what(),
                           e.condition_estimate());
    }
    if (sweep > burn && (sweep - burn) % config.thin == 0) {
      sum.noalias() += state.M * state.N.transpose();
      ++kept;
      result.trace.records.push_back(
          make_record(sweep, state, prior, fit(state), config.lambda));
    }
  }

  auto& s = result.summary;
  s.b_hat = sum / static_cast<double>(kept);
  s.kept = kept;
  s.lambda = config.lambda;
  s.prior = prior;
  s.iters = config.iters;
  s.burn_in = burn;
  s.thin = config.thin;
  s.seed = config.seed;
  s.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

ChainResult run_chain(const RegressionInstance& inst, const PriorSpec& prior,
                      const SamplerConfig& config) {
  inst.validate();
  validate_prior(prior, inst.k);
  config.validate();
  const RegressionStats stats(inst);
  const double lambda = config.lambda;
  auto step = [&](FactorState& state, Rng& rng) {
    if (config.order == ScanOrder::kMThenN) {
      state.M = update_m(state, stats, lambda, prior, rng);
      state.N = update_n(state, stats, lambda, prior, rng);
    } else {
      state.N = update_n(state, stats, lambda, prior, rng);
      state.M = update_m(state, stats, lambda, prior, rng);
    }
  };
  auto fit = [&](const FactorState& state) { return regression_fit(state, inst); };
  return drive_chain(inst, prior, config, step, fit);
}

ChainResult run_chain(const CompletionInstance& inst, const PriorSpec& prior,
                      const SamplerConfig& config) {
  inst.validate();
  validate_prior(prior, inst.k);
  config.validate();
  const MaskIndex index(inst);
  const double lambda = config.lambda;
  auto step = [&](FactorState& state, Rng& rng) {
    if (config.order == ScanOrder::kMThenN) {
      auto [M, N] = completion_update(state, index, lambda, prior, rng);
      state.M = std::move(M);
      state.N = std::move(N);
    } else {
      const Vector prec_m = prior_precision_m(state, prior);
      const Vector prec_n = prior_precision_n(state, prior);
      state.N = masked_rows_update(index.by_col, state.M, lambda, prec_n, rng);
      state.M = masked_rows_update(index.by_row, state.N, lambda, prec_m, rng);
    }
  };
  auto fit = [&](const FactorState& state) { return completion_fit(state, inst); };
  return drive_chain(inst, prior, config, step, fit);
}

}  // namespace bayesrank
