#pragma once

#include <Eigen/Core>

#include <optional>
#include <variant>
#include <vector>

#include "bayesrank/rng.hpp"

namespace bayesrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Problem shape: Y is ell x m, X is ell x p, factors are p x k and m x k.
struct Dims {
  int ell = 1;
  int p = 1;
  int m = 1;
  int k = 1;

  void validate() const;
  bool operator==(const Dims&) const = default;
};

struct GaussianNoise {
  double sigma2;
};

// Uniform on [-zeta, zeta]: the reference bounded law with a density floor.
struct BoundedUniformNoise {
  double zeta;
};

/// Noise law plus the variance proxy s^2 the estimator is tuned with.
///
/// s^2 defaults to the smallest admissible value (sigma^2 for Gaussian noise,
/// zeta^2 / 2 for the bounded uniform law, from E|e| / (2 f_min) with
/// E|e| = zeta / 2 and f_min = 1 / (2 zeta)). Overrides may only go upward.
class NoiseSpec {
 public:
  using Law = std::variant<GaussianNoise, BoundedUniformNoise>;

  static NoiseSpec gaussian(double sigma2, std::optional<double> s2 = {});
  static NoiseSpec bounded_uniform(double zeta, std::optional<double> s2 = {});

  const Law& law() const { return law_; }
  double s2() const { return s2_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianNoise>(law_); }

  // Smallest s^2 the law admits.
  double min_s2() const;
  // Actual per-entry variance of the law.
  double variance() const;

 private:
  NoiseSpec(Law law, double s2) : law_(law), s2_(s2) {}
  Law law_;
  double s2_;
};

/// Ground-truth factorization B = M0 * N0^T with k0 columns.
struct LowRankTruth {
  Matrix M0;  // p x k0
  Matrix N0;  // m x k0
  Matrix B;   // p x m

  int k0() const { return static_cast<int>(M0.cols()); }
};

struct RegressionInstance {
  Matrix X;  // ell x p
  Matrix Y;  // ell x m
  std::optional<LowRankTruth> truth;
  NoiseSpec noise = NoiseSpec::gaussian(1.0);

  // Factorization width used when fitting; not derivable from X and Y.
  int k = 1;

  Dims dims() const;
  void validate() const;
};

struct Entry {
  int row;
  int col;
  auto operator<=>(const Entry&) const = default;
};

struct CompletionInstance {
  int ell = 1;
  int m = 1;
  int k = 1;
  std::vector<Entry> mask;
  Vector observed;  // one value per mask entry, same order
  std::optional<Matrix> truth;
  NoiseSpec noise = NoiseSpec::gaussian(1.0);

  // Completion is regression with X = I: p coincides with ell.
  Dims dims() const { return {ell, ell, m, k}; }
  void validate() const;
};

LowRankTruth lowrank_from_factors(Matrix M0, Matrix N0);

/// Truth factors with i.i.d. uniform[-amp, amp] entries.
LowRankTruth gen_lowrank(int p, int m, int k0, double amp, Rng& rng);

enum class DesignKind { kIdentity, kGaussianIid, kScaledBounded };

struct DesignSpec {
  DesignKind kind = DesignKind::kScaledBounded;
  double scale = 1.0;  // C for kScaledBounded; ignored otherwise
};

Matrix gen_design(int ell, int p, const DesignSpec& design, Rng& rng);

Matrix add_noise(const Matrix& signal, const NoiseSpec& noise, Rng& rng);

double frobenius_sq(const Matrix& a);

/// round(frac * ell * m) distinct cells drawn uniformly, returned sorted.
std::vector<Entry> gen_mask(int ell, int m, double frac, Rng& rng);

// Singular values below rel_tol * sigma_max count as zero.
int numerical_rank(const Matrix& a, double rel_tol);

/// Moore-Penrose pseudoinverse through the SVD; singular values below
/// rel_tol * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& a, double rel_tol = 1e-12);

}  // namespace bayesrank
