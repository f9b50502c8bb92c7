#pragma once

#include <variant>

#include "bayesrank/matdata.hpp"
#include "bayesrank/rng.hpp"

namespace bayesrank {

/// Per-column Gaussian variances for M and N, held fixed.
///
/// Covers the all-entries shrinkage prior (var_m = var_n = 1 / tau^2) and the
/// per-column prior with separate sigma_j^2, rho_j^2.
struct FixedPrior {
  Vector var_m;
  Vector var_n;
};

/// Columns share a variance gamma_j with 1 / gamma_j ~ Gamma(a, rate b).
struct GammaHierPrior {
  double a;
  double b;
};

using PriorSpec = std::variant<FixedPrior, GammaHierPrior>;

// Throws on nonpositive parameters or a column count different from k.
void validate_prior(const PriorSpec& prior, int k);

inline bool is_hierarchical(const PriorSpec& prior) {
  return std::holds_alternative<GammaHierPrior>(prior);
}

/// Current state of the chain. B = M N^T is derived on demand.
struct FactorState {
  Matrix M;      // p x k
  Matrix N;      // m x k
  Vector gamma;  // length k under GammaHier; empty under Fixed

  Matrix product() const { return M * N.transpose(); }
  int k() const { return static_cast<int>(M.cols()); }
};

// Normalized log density of independent N(0, var_m[j]) / N(0, var_n[j]) columns.
double log_prior_columns(const Matrix& M, const Matrix& N, const Vector& var_m,
                         const Vector& var_n);

/// log pi(M, N | Gamma), normalized. Throws DomainError on gamma_j <= 0.
double log_prior_given_gamma(const FactorState& state);

/// log pi(Gamma) for i.i.d. inverse-Gamma(a, b) entries, normalized.
double log_prior_gamma(const Vector& gamma, double a, double b);

/// Joint log prior of the state: log pi(M, N | Gamma) + log pi(Gamma) under
/// GammaHier, or the fixed-variance column density.
double log_prior(const FactorState& state, const PriorSpec& prior);

// Per-column prior precisions seen by the M and N conditionals.
Vector prior_precision_m(const FactorState& state, const PriorSpec& prior);
Vector prior_precision_n(const FactorState& state, const PriorSpec& prior);

// Lower clamp applied to every sampled gamma_j.
inline constexpr double kGammaFloor = 1e-12;

FactorState sample_prior(const PriorSpec& prior, const Dims& dims, Rng& rng);

struct TheoremHyperparams {
  double a;
  double b;
  double lambda;
};

/// a = 1, b = s2 / (2 ell p k^2 (m^2 + p^2)), lambda = 1 / (4 s2).
TheoremHyperparams theorem_hyperparams(double s2, int ell, int p, int m, int k);

}  // namespace bayesrank
