#include "bayesrank/matdata.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "bayesrank/errors.hpp"

namespace bayesrank {

void Dims::validate() const {
  if (ell < 1 || p < 1 || m < 1 || k < 1) {
    throw DimensionError("dims must all be >= 1");
  }
  if (k > std::min(p, m)) {
    throw DimensionError("k = " + std::to_string(k) + " exceeds min(p, m) = " +
                         std::to_string(std::min(p, m)));
  }
}

NoiseSpec NoiseSpec::gaussian(double sigma2, std::optional<double> s2) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be > 0");
  NoiseSpec spec(GaussianNoise{sigma2}, sigma2);
  if (s2) {
    if (!(*s2 >= spec.min_s2())) {
      throw DomainError("s2 must be >= sigma2 under Gaussian noise");
    }
    spec.s2_ = *s2;
  }
  return spec;
}

NoiseSpec NoiseSpec::bounded_uniform(double zeta, std::optional<double> s2) {
  if (!(zeta > 0.0)) throw DomainError("zeta must be > 0");
  NoiseSpec spec(BoundedUniformNoise{zeta}, 0.0);
  spec.s2_ = spec.min_s2();
  if (s2) {
    if (!(*s2 >= spec.min_s2())) {
      throw DomainError("s2 must be >= zeta^2 / 2 under bounded uniform noise");
    }
    spec.s2_ = *s2;
  }
  return spec;
}

double NoiseSpec::min_s2() const {
  if (const auto* g = std::get_if<GaussianNoise>(&law_)) return g->sigma2;
  const double zeta = std::get<BoundedUniformNoise>(law_).zeta;
  return zeta * zeta / 2.0;
}

double NoiseSpec::variance() const {
  if (const auto* g = std::get_if<GaussianNoise>(&law_)) return g->sigma2;
  const double zeta = std::get<BoundedUniformNoise>(law_).zeta;
  return zeta * zeta / 3.0;
}

Dims RegressionInstance::dims() const {
  return {static_cast<int>(X.rows()), static_cast<int>(X.cols()),
          static_cast<int>(Y.cols()), k};
}

void RegressionInstance::validate() const {
  if (X.rows() != Y.rows()) {
    throw DimensionError("X has " + std::to_string(X.rows()) +
                         " rows but Y has " + std::to_string(Y.rows()));
  }
  dims().validate();
  if (truth) {
    if (truth->B.rows() != X.cols() || truth->B.cols() != Y.cols()) {
      throw DimensionError("truth B must be p x m");
    }
    if (truth->M0.rows() != X.cols() || truth->N0.rows() != Y.cols() ||
        truth->M0.cols() != truth->N0.cols()) {
      throw DimensionError("truth factors must be p x k0 and m x k0");
    }
    const double gap = (truth->B - truth->M0 * truth->N0.transpose()).norm();
    if (!(gap <= 1e-12 * std::max(1.0, truth->B.norm()))) {
      throw DomainError("truth B does not equal M0 N0^T");
    }
  }
}

void CompletionInstance::validate() const {
  dims().validate();
  if (mask.empty()) throw ConfigError("completion mask is empty");
  if (static_cast<std::size_t>(observed.size()) != mask.size()) {
    throw DimensionError("observed values must match mask length");
  }
  std::set<Entry> seen;
  for (const auto& e : mask) {
    if (e.row < 0 || e.row >= ell || e.col < 0 || e.col >= m) {
      throw DimensionError("mask index (" + std::to_string(e.row) + ", " +
                           std::to_string(e.col) + ") out of range");
    }
    if (!seen.insert(e).second) {
      throw ConfigError("duplicate mask index (" + std::to_string(e.row) +
                        ", " + std::to_string(e.col) + ")");
    }
  }
  if (truth && (truth->rows() != ell || truth->cols() != m)) {
    throw DimensionError("completion truth must be ell x m");
  }
}

LowRankTruth lowrank_from_factors(Matrix M0, Matrix N0) {
  if (M0.cols() != N0.cols()) {
    throw DimensionError("truth factors must share their column count");
  }
  LowRankTruth truth;
  truth.B = M0 * N0.transpose();
  truth.M0 = std::move(M0);
  truth.N0 = std::move(N0);
  return truth;
}

LowRankTruth gen_lowrank(int p, int m, int k0, double amp, Rng& rng) {
  if (p < 1 || m < 1 || k0 < 0) throw DimensionError("invalid truth dims");
  if (k0 > std::min(p, m)) {
    throw DimensionError("k0 = " + std::to_string(k0) + " exceeds min(p, m)");
  }
  if (!(amp > 0.0)) throw DomainError("truth amplitude must be > 0");
  std::uniform_real_distribution<double> unif(-amp, amp);
  Matrix M0(p, k0);
  Matrix N0(m, k0);
  for (Eigen::Index j = 0; j < M0.cols(); ++j)
    for (Eigen::Index i = 0; i < M0.rows(); ++i) M0(i, j) = unif(rng);
  for (Eigen::Index j = 0; j < N0.cols(); ++j)
    for (Eigen::Index i = 0; i < N0.rows(); ++i) N0(i, j) = unif(rng);
  return lowrank_from_factors(std::move(M0), std::move(N0));
}

Matrix gen_design(int ell, int p, const DesignSpec& design, Rng& rng) {
  if (ell < 1 || p < 1) throw DimensionError("design dims must be >= 1");
  Matrix X(ell, p);
  switch (design.kind) {
    case DesignKind::kIdentity:
      if (ell != p) {
        throw DimensionError("identity design requires ell == p");
      }
      X.setIdentity();
      break;
    case DesignKind::kGaussianIid: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < ell; ++i) X(i, j) = normal(rng);
      break;
    }
    case DesignKind::kScaledBounded: {
      if (!(design.scale > 0.0)) throw DomainError("design scale must be > 0");
      std::uniform_real_distribution<double> unif(-design.scale, design.scale);
      for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < ell; ++i) X(i, j) = unif(rng);
      break;
    }
  }
  return X;
}

Matrix add_noise(const Matrix& signal, const NoiseSpec& noise, Rng& rng) {
  Matrix y = signal;
  if (const auto* g = std::get_if<GaussianNoise>(&noise.law())) {
    std::normal_distribution<double> normal(0.0, std::sqrt(g->sigma2));
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += normal(rng);
  } else {
    const double zeta = std::get<BoundedUniformNoise>(noise.law()).zeta;
    std::uniform_real_distribution<double> unif(-zeta, zeta);
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += unif(rng);
  }
  return y;
}

double frobenius_sq(const Matrix& a) { return a.squaredNorm(); }

std::vector<Entry> gen_mask(int ell, int m, double frac, Rng& rng) {
  if (ell < 1 || m < 1) throw DimensionError("mask dims must be >= 1");
  if (!(frac > 0.0 && frac <= 1.0)) throw ConfigError("mask fraction must lie in (0, 1]");
  const long long cells = static_cast<long long>(ell) * m;
  const long long count = std::llround(frac * static_cast<double>(cells));
  if (count < 1) throw ConfigError("mask would be empty");

  // Partial Fisher-Yates over the flattened row-major grid.
  std::vector<long long> idx(static_cast<std::size_t>(cells));
  std::iota(idx.begin(), idx.end(), 0LL);
  for (long long i = 0; i < count; ++i) {
    std::uniform_int_distribution<long long> pick(i, cells - 1);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<Entry> mask;
  mask.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const long long flat = idx[static_cast<std::size_t>(i)];
    mask.push_back({static_cast<int>(flat / m), static_cast<int>(flat % m)});
  }
  std::sort(mask.begin(), mask.end());
  return mask;
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) >= cut) ++r;
  return r;
}

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? rel_tol * sv(0) : 0.0;
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace bayesrank
