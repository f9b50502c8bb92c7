#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "bayesrank/matdata.hpp"
#include "bayesrank/priors.hpp"
#include "bayesrank/rng.hpp"

namespace bayesrank {

enum class InitKind { kPriorDraw, kSvdWarmstart };

// Gamma is always updated last in a sweep.
enum class ScanOrder { kMThenN, kNThenM };

struct SamplerConfig {
  double lambda = 1.0;
  int iters = 1000;
  std::optional<int> burn_in;  // defaults to iters / 5
  int thin = 1;
  std::uint64_t seed = 0;
  InitKind init = InitKind::kSvdWarmstart;
  ScanOrder order = ScanOrder::kMThenN;

  int resolved_burn_in() const { return burn_in ? *burn_in : iters / 5; }
  int expected_kept() const { return (iters - resolved_burn_in()) / thin; }
  void validate() const;
};

struct TraceRecord {
  int sweep;
  double residual_fro_sq;
  double log_pseudo_posterior;
  Vector gamma;    // gamma_j, or the fixed var_m_j under a Fixed prior
  Vector colnorm;  // |M_j|^2 + |N_j|^2
};

struct ChainTrace {
  std::vector<TraceRecord> records;

  // sweep,residual_fro_sq,log_pseudo_posterior,gamma_1..gamma_k,colnorm_1..colnorm_k
  void write_csv(std::ostream& out) const;
};

/// Gibbs posterior mean B_hat = E[M N^T] under the tempered pseudo-posterior,
/// estimated by averaging kept sweeps.
struct PosteriorSummary {
  Matrix b_hat;
  int kept = 0;
  double lambda = 0.0;
  PriorSpec prior;
  int iters = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
};

struct ChainResult {
  PosteriorSummary summary;
  ChainTrace trace;
};

/// Gaussian in natural form: x ~ N(precision^{-1} rhs, precision^{-1}).
struct GaussianConditional {
  Matrix precision;
  Vector rhs;

  Vector mean() const;
};

// Sufficient statistics of a regression instance for the factor updates.
struct RegressionStats {
  Matrix xtx;  // X^T X, p x p
  Matrix xty;  // X^T Y, p x m

  explicit RegressionStats(const RegressionInstance& inst)
      : xtx(inst.X.transpose() * inst.X), xty(inst.X.transpose() * inst.Y) {}
};

double regression_fit(const FactorState& state, const RegressionInstance& inst);
double completion_fit(const FactorState& state, const CompletionInstance& inst);

/// -lambda * fit + log prior (normalized prior, unnormalized data term).
double log_pseudo_posterior(const FactorState& state,
                            const RegressionInstance& inst, double lambda,
                            const PriorSpec& prior);
double log_pseudo_posterior(const FactorState& state,
                            const CompletionInstance& inst, double lambda,
                            const PriorSpec& prior);

/// Conditional of vec(M) (column-major) given N and Gamma:
/// precision 2 lambda (N^T N kron X^T X) + diag(prec_m) kron I_p,
/// rhs 2 lambda vec(X^T Y N).
GaussianConditional conditional_m(const Matrix& N, const RegressionStats& stats,
                                  double lambda, const Vector& prec_m);

/// Rows of N are conditionally independent and share one precision
/// 2 lambda A^T A + diag(prec_n) with A = X M. Column i of `rhs` is the
/// natural-form right-hand side for row i.
struct RowConditionals {
  Matrix precision;  // k x k
  Matrix rhs;        // k x m
};
RowConditionals conditional_n(const Matrix& M, const RegressionStats& stats,
                              double lambda, const Vector& prec_n);

/// Draw from N(P^{-1} rhs, P^{-1}). Cholesky with a jitter ladder of
/// 1e-12, 1e-9, 1e-6 times the mean diagonal; NumericalError afterwards.
Vector draw_gaussian(const GaussianConditional& cond, Rng& rng);

Matrix cond_update_m(const FactorState& state, const RegressionInstance& inst,
                     double lambda, const PriorSpec& prior, Rng& rng);
Matrix cond_update_n(const FactorState& state, const RegressionInstance& inst,
                     double lambda, const PriorSpec& prior, Rng& rng);

/// gamma_j ~ InvGamma(a + (p + m) / 2, b + (|M_j|^2 + |N_j|^2) / 2), floored at
/// kGammaFloor.
Vector cond_update_gamma(const FactorState& state, double a, double b, Rng& rng);

/// Masked row-wise updates: rows of M given N, then rows of N given the new M.
std::pair<Matrix, Matrix> cond_update_completion(const FactorState& state,
                                                 const CompletionInstance& inst,
                                                 double lambda,
                                                 const PriorSpec& prior,
                                                 Rng& rng);

FactorState initial_state(const RegressionInstance& inst, const PriorSpec& prior,
                          const SamplerConfig& config, Rng& rng);
FactorState initial_state(const CompletionInstance& inst, const PriorSpec& prior,
                          const SamplerConfig& config, Rng& rng);

ChainResult run_chain(const RegressionInstance& inst, const PriorSpec& prior,
                      const SamplerConfig& config);
ChainResult run_chain(const CompletionInstance& inst, const PriorSpec& prior,
                      const SamplerConfig& config);

}  // namespace bayesrank
