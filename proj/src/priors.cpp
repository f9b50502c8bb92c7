#include "bayesrank/priors.hpp"

#include <cmath>
#include <algorithm>
#include <random>
#include <string>

#include "bayesrank/errors.hpp"

namespace bayesrank {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_positive(const Vector& v, const char* name) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (!(v(j) > 0.0)) {
      throw DomainError(std::string(name) + "[" + std::to_string(j) +
                        "] must be > 0");
    }
  }
}

}  // namespace

void validate_prior(const PriorSpec& prior, int k) {
  if (const auto* f = std::get_if<FixedPrior>(&prior)) {
    if (f->var_m.size() != k || f->var_n.size() != k) {
      throw DimensionError("fixed prior needs k = " + std::to_string(k) +
                           " variances for M and for N");
    }
    require_positive(f->var_m, "var_m");
    require_positive(f->var_n, "var_n");
  } else {
    const auto& g = std::get<GammaHierPrior>(prior);
    if (!(g.a > 0.0)) throw DomainError("gamma prior shape a must be > 0");
    if (!(g.b > 0.0)) throw DomainError("gamma prior rate b must be > 0");
  }
}

double log_prior_columns(const Matrix& M, const Matrix& N, const Vector& var_m,
                         const Vector& var_n) {
  if (var_m.size() != M.cols() || var_n.size() != N.cols()) {
    throw DimensionError("prior variance length must match factor columns");
  }
  require_positive(var_m, "var_m");
  require_positive(var_n, "var_n");
  const double p = static_cast<double>(M.rows());
  const double m = static_cast<double>(N.rows());
  double total = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    total -= 0.5 * M.col(j).squaredNorm() / var_m(j) +
             0.5 * p * (kLog2Pi + std::log(var_m(j)));
    total -= 0.5 * N.col(j).squaredNorm() / var_n(j) +
             0.5 * m * (kLog2Pi + std::log(var_n(j)));
  }
  return total;
}

double log_prior_given_gamma(const FactorState& state) {
  if (state.gamma.size() != state.M.cols()) {
    throw DimensionError("gamma length must equal k");
  }
  require_positive(state.gamma, "gamma");
  return log_prior_columns(state.M, state.N, state.gamma, state.gamma);
}

double log_prior_gamma(const Vector& gamma, double a, double b) {
  if (!(a > 0.0)) throw DomainError("a must be > 0");
  if (!(b > 0.0)) throw DomainError("b must be > 0");
  require_positive(gamma, "gamma");
  const double norm = a * std::log(b) - std::lgamma(a);
  double total = 0.0;
  for (Eigen::Index j = 0; j < gamma.size(); ++j) {
    total += norm - (a + 1.0) * std::log(gamma(j)) - b / gamma(j);
  }
  return total;
}

double log_prior(const FactorState& state, const PriorSpec& prior) {
  if (const auto* f = std::get_if<FixedPrior>(&prior)) {
    return log_prior_columns(state.M, state.N, f->var_m, f->var_n);
  }
  const auto& g = std::get<GammaHierPrior>(prior);
  return log_prior_given_gamma(state) + log_prior_gamma(state.gamma, g.a, g.b);
}

Vector prior_precision_m(const FactorState& state, const PriorSpec& prior) {
  if (const auto* f = std::get_if<FixedPrior>(&prior)) return f->var_m.cwiseInverse();
  return state.gamma.cwiseInverse();
}

Vector prior_precision_n(const FactorState& state, const PriorSpec& prior) {
  if (const auto* f = std::get_if<FixedPrior>(&prior)) return f->var_n.cwiseInverse();
  return state.gamma.cwiseInverse();
}

FactorState sample_prior(const PriorSpec& prior, const Dims& dims, Rng& rng) {
  dims.validate();
  validate_prior(prior, dims.k);
  FactorState state;
  state.M.resize(dims.p, dims.k);
  state.N.resize(dims.m, dims.k);
  Vector var_m;
  Vector var_n;
  if (const auto* f = std::get_if<FixedPrior>(&prior)) {
    var_m = f->var_m;
    var_n = f->var_n;
  } else {
    const auto& g = std::get<GammaHierPrior>(prior);
    std::gamma_distribution<double> precision(g.a, 1.0 / g.b);
    state.gamma.resize(dims.k);
    for (int j = 0; j < dims.k; ++j) {
      state.gamma(j) = std::max(1.0 / precision(rng), kGammaFloor);
    }
    var_m = state.gamma;
    var_n = state.gamma;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < dims.k; ++j) {
    const double sm = std::sqrt(var_m(j));
    const double sn = std::sqrt(var_n(j));
    for (int i = 0; i < dims.p; ++i) state.M(i, j) = sm * normal(rng);
    for (int i = 0; i < dims.m; ++i) state.N(i, j) = sn * normal(rng);
  }
  return state;
}

TheoremHyperparams theorem_hyperparams(double s2, int ell, int p, int m, int k) {
  if (!(s2 > 0.0) || ell < 1 || p < 1 || m < 1 || k < 1) {
    throw DomainError("theorem hyperparameters need positive inputs");
  }
  const double dl = ell, dp = p, dm = m, dk = k;
  const double b = s2 / (2.0 * dl * dp * dk * dk * (dm * dm + dp * dp));
  return {1.0, b, 1.0 / (4.0 * s2)};
}

}  // namespace bayesrank
