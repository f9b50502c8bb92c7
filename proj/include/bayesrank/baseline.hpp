#pragma once

#include "bayesrank/matdata.hpp"

namespace bayesrank {

struct BaselineFit {
  Matrix b_hat;
  int rank_used = 0;
  double penalized_objective = 0.0;  // |Y - X B|_F^2 + pen * rank_used
};

/// Minimum-norm least squares, B = X^+ Y.
Matrix ols_fit(const Matrix& X, const Matrix& Y);

/// Rank-r least squares: truncate the SVD of the OLS fitted values to rank r
/// and map back through X^+. Optimal over rank <= r when X has full column rank.
BaselineFit reduced_rank_fit(const Matrix& X, const Matrix& Y, int r);

/// Scans r = 0..min(p, m) and keeps the minimizer of |Y - X B_r|^2 + pen * r.
/// Ties go to the smaller rank.
BaselineFit rank_penalized_select(const Matrix& X, const Matrix& Y, double pen);

/// 2 s2 (rank(X) + m) log(ell max(p, m)).
double default_rank_penalty(const Matrix& X, int m, double s2);

}  // namespace bayesrank
