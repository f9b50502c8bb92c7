#include "bayesrank/baseline.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "bayesrank/errors.hpp"

namespace bayesrank {

namespace {

constexpr double kPinvTol = 1e-12;

void check_shapes(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows()) throw DimensionError("X and Y must have the same row count");
}

// Fitted values and pseudoinverse, shared by the rank scan.
struct OlsParts {
  Matrix pinv;
  Matrix fitted;
  Eigen::JacobiSVD<Matrix> fitted_svd;

  OlsParts(const Matrix& X, const Matrix& Y)
      : pinv(pseudo_inverse(X, kPinvTol)),
        fitted(X * (pinv * Y)),
        fitted_svd(fitted, Eigen::ComputeThinU | Eigen::ComputeThinV) {}

  Matrix rank_r_coefficients(int r) const {
    const Eigen::Index rr =
        std::min<Eigen::Index>(r, fitted_svd.singularValues().size());
    const Matrix truncated = fitted_svd.matrixU().leftCols(rr) *
                             fitted_svd.singularValues().head(rr).asDiagonal() *
                             fitted_svd.matrixV().leftCols(rr).transpose();
    return pinv * truncated;
  }
};

}  // namespace

Matrix ols_fit(const Matrix& X, const Matrix& Y) {
  check_shapes(X, Y);
  return pseudo_inverse(X, kPinvTol) * Y;
}

BaselineFit reduced_rank_fit(const Matrix& X, const Matrix& Y, int r) {
  check_shapes(X, Y);
  if (r < 0) throw DomainError("rank must be >= 0");
  const OlsParts parts(X, Y);
  BaselineFit fit;
  fit.b_hat = parts.rank_r_coefficients(r);
  fit.rank_used = r;
  fit.penalized_objective = (Y - X * fit.b_hat).squaredNorm();
  return fit;
}

BaselineFit rank_penalized_select(const Matrix& X, const Matrix& Y, double pen) {
  check_shapes(X, Y);
  if (!(pen >= 0.0)) throw DomainError("penalty must be >= 0");
  const OlsParts parts(X, Y);
  const int max_rank = static_cast<int>(std::min(X.cols(), Y.cols()));
  BaselineFit best;
  for (int r = 0; r <= max_rank; ++r) {
    Matrix b = parts.rank_r_coefficients(r);
    const double objective = (Y - X * b).squaredNorm() + pen * r;
    if (r == 0 || objective < best.penalized_objective) {
      best.b_hat = std::move(b);
      best.rank_used = r;
      best.penalized_objective = objective;
    }
  }
  return best;
}

double default_rank_penalty(const Matrix& X, int m, double s2) {
  const int rank_x = numerical_rank(X, kPinvTol);
  const double lpm = static_cast<double>(X.rows()) * std::max<Eigen::Index>(X.cols(), m);
  return 2.0 * s2 * (rank_x + m) * std::log(lpm);
}

}  // namespace bayesrank
