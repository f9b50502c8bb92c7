#pragma once

#include <string>
#include <vector>

#include "bayesrank/matdata.hpp"

namespace bayesrank {

/// A reference point (J, M, N) of the oracle inequality together with the
/// problem it is evaluated on. Columns of M and N outside J must be zero.
struct BoundInputs {
  std::vector<int> support;  // J, 0-based column indices
  Matrix M;                  // p x k
  Matrix N;                  // m x k
  Matrix B;                  // p x m
  Matrix X;                  // ell x p
  double s2 = 1.0;
  Dims dims;

  void validate() const;
};

/// Scalar summaries that the closed-form bounds actually depend on.
struct BoundNorms {
  double approx = 0.0;     // |X (M N^T - B)|_F^2
  double m_fro_sq = 0.0;   // |M|_F^2
  double n_fro_sq = 0.0;   // |N|_F^2
  double x_fro_sq = 0.0;   // |X|_F^2
  int support_size = 0;    // |J|
  double s2 = 1.0;
  Dims dims;
};

BoundNorms norms_of(const BoundInputs& inputs);

struct BoundBreakdown {
  double approx_term = 0.0;
  double rank_term = 0.0;
  double k_term = 0.0;
  double design_term = 0.0;
  double norm_term = 0.0;
  double total = 0.0;
  std::vector<std::string> warnings;
};

/// Oracle inequality of the hierarchical-prior estimator at one reference
/// point, constants (6, 8, 1.34, 22.17, 16) as published. Log arguments <= 1
/// are reported in `warnings`, never clamped.
BoundBreakdown theorem1_bound(const BoundInputs& inputs);
BoundBreakdown theorem1_bound(const BoundNorms& norms);

/// Bounded-design, bounded-factor simplification:
/// 50 s2 (m + p) k0 {log(ell max(p, m)) + log(max(1/s2, 1)) + 1 + C^2 (1 + c^2 + s2)}.
double remark1_bound(int k0, int m, int p, int ell, double s2, double C, double c);

/// expected_fit + kl / lambda.
double pacbayes_template_bound(double expected_fit, double kl, double lambda);

/// Upper bound on K(rho_{M,N,c}, pi) for the ball-restricted prior, valid
/// under b = kappa, kappa < 1/2 and the two kappa <= c^2 / (2 d k log(2 d k))
/// conditions. Violations throw ConstraintError naming the condition.
double kl_restriction_bound(const Matrix& M, const Matrix& N, double c, double kappa,
                            double a, double b, int p, int m, int k, int k0);

/// The oracle bound before c is fixed:
/// 2 c^2 |X|^2 (|N|^2 + |M|^2 + 2 c^2) + |X (M N^T - B)|^2 + KL bound / lambda.
double oracle_bound_free_c(const BoundInputs& inputs, double c, double kappa, double a,
                           double b, double lambda);

// The ball radius used to specialize the free-c bound: sqrt(s2 / (ell p)).
double theorem_radius(double s2, int ell, int p);

/// C sigma2 rank(B) (rank(X) + m).
double bunea_rate(double sigma2, int rank_b, int rank_x, int m, double C);

/// Zero-pads truth factors (p x k0, m x k0) to k columns with J = {0..k0-1}.
BoundInputs oracle_inputs(const LowRankTruth& truth, const Matrix& X, double s2,
                          const Dims& dims);

}  // namespace bayesrank
