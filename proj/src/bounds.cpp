#include "bayesrank/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "bayesrank/errors.hpp"

namespace bayesrank {

void BoundInputs::validate() const {
  dims.validate();
  if (!(s2 > 0.0)) throw DomainError("s2 must be > 0");
  if (M.rows() != dims.p || M.cols() != dims.k) throw DimensionError("M must be p x k");
  if (N.rows() != dims.m || N.cols() != dims.k) throw DimensionError("N must be m x k");
  if (B.rows() != dims.p || B.cols() != dims.m) throw DimensionError("B must be p x m");
  if (X.rows() != dims.ell || X.cols() != dims.p) throw DimensionError("X must be ell x p");
  std::set<int> in_j;
  for (int j : support) {
    if (j < 0 || j >= dims.k) throw DimensionError("support index out of range");
    if (!in_j.insert(j).second) throw DimensionError("support indices must be distinct");
  }
  for (int j = 0; j < dims.k; ++j) {
    if (in_j.count(j)) continue;
    if (M.col(j).squaredNorm() != 0.0 || N.col(j).squaredNorm() != 0.0) {
      throw DomainError("M_j and N_j must vanish for j outside the support (j = " +
                        std::to_string(j) + ")");
    }
  }
}

BoundNorms norms_of(const BoundInputs& inputs) {
  inputs.validate();
  BoundNorms n;
  n.approx = (inputs.X * (inputs.M * inputs.N.transpose() - inputs.B)).squaredNorm();
  n.m_fro_sq = inputs.M.squaredNorm();
  n.n_fro_sq = inputs.N.squaredNorm();
  n.x_fro_sq = inputs.X.squaredNorm();
  n.support_size = static_cast<int>(inputs.support.size());
  n.s2 = inputs.s2;
  n.dims = inputs.dims;
  return n;
}

BoundBreakdown theorem1_bound(const BoundNorms& n) {
  n.dims.validate();
  if (!(n.s2 > 0.0)) throw DomainError("s2 must be > 0");
  if (n.support_size < 0 || n.support_size > n.dims.k) {
    throw DimensionError("support size must lie in [0, k]");
  }
  const double s2 = n.s2;
  const double ell = n.dims.ell, p = n.dims.p, m = n.dims.m, k = n.dims.k;
  const double lp = ell * p;

  BoundBreakdown out;
  const double rank_arg = 1.34 * lp / s2;
  const double k_arg = 22.17 * lp * k * k * (m * m + p * p) / s2;
  if (rank_arg <= 1.0) {
    std::ostringstream msg;
    msg << "rank_term log argument 1.34*ell*p/s2 = " << rank_arg
        << " <= 1; the term is not an upper-bound contribution";
    out.warnings.push_back(msg.str());
  }
  if (k_arg <= 1.0) {
    std::ostringstream msg;
    msg << "k_term log argument 22.17*ell*p*k^2*(m^2+p^2)/s2 = " << k_arg << " <= 1";
    out.warnings.push_back(msg.str());
  }

  const double norms = n.n_fro_sq + n.m_fro_sq;
  out.approx_term = n.approx;
  out.rank_term = 6.0 * s2 * (m + p) * n.support_size * std::log(rank_arg);
  out.k_term = 8.0 * s2 * k * std::log(k_arg);
  out.design_term = (2.0 * s2 * n.x_fro_sq / lp) * (norms + 2.0 * s2 / lp + 16.0 * s2);
  out.norm_term = 8.0 * s2 * (norms + std::numbers::ln2);
  out.total = out.approx_term + out.rank_term + out.k_term + out.design_term + out.norm_term;
  return out;
}

BoundBreakdown theorem1_bound(const BoundInputs& inputs) {
  return theorem1_bound(norms_of(inputs));
}

double remark1_bound(int k0, int m, int p, int ell, double s2, double C, double c) {
  if (k0 < 0) throw DomainError("k0 must be >= 0");
  if (m < 1 || p < 1 || ell < 1) throw DomainError("dims must be >= 1");
  if (!(s2 > 0.0) || !(C > 0.0) || !(c > 0.0)) {
    throw DomainError("s2, C and c must be > 0");
  }
  const double braces = std::log(static_cast<double>(ell) * std::max(p, m)) +
                        std::log(std::max(1.0 / s2, 1.0)) + 1.0 +
                        C * C * (1.0 + c * c + s2);
  return 50.0 * s2 * static_cast<double>(m + p) * k0 * braces;
}

double pacbayes_template_bound(double expected_fit, double kl, double lambda) {
  if (kl < 0.0) throw DomainError("KL divergence must be >= 0");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  return expected_fit + kl / lambda;
}

namespace {

void check_kl_constraints(double c, double kappa, double a, double b, int p, int m,
                          int k) {
  if (!(c > 0.0)) throw DomainError("c must be > 0");
  if (!(a > 0.0)) throw DomainError("a must be > 0");
  if (!(kappa > 0.0)) throw ConstraintError("kappa_positive", "kappa must be > 0");
  if (std::abs(b - kappa) > 1e-12 * std::max(std::abs(b), std::abs(kappa))) {
    throw ConstraintError("b_equals_kappa", "the restriction bound requires b = kappa");
  }
  if (!(kappa < 0.5)) throw ConstraintError("kappa_lt_half", "kappa must be < 1/2");
  const double c2 = c * c;
  const double pk = static_cast<double>(p) * k;
  const double mk = static_cast<double>(m) * k;
  if (kappa > c2 / (2.0 * pk * std::log(2.0 * pk))) {
    throw ConstraintError("kappa_le_c2_over_2pk_log_2pk",
                          "kappa exceeds c^2 / (2 p k log(2 p k))");
  }
  if (kappa > c2 / (2.0 * mk * std::log(2.0 * mk))) {
    throw ConstraintError("kappa_le_c2_over_2mk_log_2mk",
                          "kappa exceeds c^2 / (2 m k log(2 m k))");
  }
}

// Everything in the KL bound except the 2|M|^2 + 2|N|^2 part.
double kl_constant_part(double c, double kappa, double a, int p, int m, int k, int k0) {
  const double dp = p, dk = k;
  const double radius_log =
      std::log(std::sqrt(3.0 * std::numbers::pi * dp * dk / 4.0) / c);
  // log(Gamma(a) 3^{a+1} e^2 / (kappa^{a+1} 2^a))
  const double gamma_log = std::lgamma(a) + (a + 1.0) * std::log(3.0) + 2.0 -
                           (a + 1.0) * std::log(kappa) - a * std::numbers::ln2;
  return 4.0 * c * c + 2.0 * std::numbers::ln2 +
         static_cast<double>(m + p) * k0 * radius_log + 2.0 * dk * gamma_log;
}

}  // namespace

double kl_restriction_bound(const Matrix& M, const Matrix& N, double c, double kappa,
                            double a, double b, int p, int m, int k, int k0) {
  if (p < 1 || m < 1 || k < 1) throw DimensionError("p, m, k must be >= 1");
  if (k0 < 0 || k0 > k) throw DimensionError("k0 must lie in [0, k]");
  if (M.rows() != p || N.rows() != m || M.cols() != N.cols()) {
    throw DimensionError("M must be p x k and N must be m x k");
  }
  check_kl_constraints(c, kappa, a, b, p, m, k);
  return 2.0 * M.squaredNorm() + 2.0 * N.squaredNorm() +
         kl_constant_part(c, kappa, a, p, m, k, k0);
}

double oracle_bound_free_c(const BoundInputs& inputs, double c, double kappa, double a,
                           double b, double lambda) {
  const BoundNorms n = norms_of(inputs);
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  if (lambda > 1.0 / (4.0 * n.s2)) {
    throw ConstraintError("lambda_le_quarter_inv_s2", "lambda must be <= 1 / (4 s2)");
  }
  const double kl = kl_restriction_bound(inputs.M, inputs.N, c, kappa, a, b,
                                         n.dims.p, n.dims.m, n.dims.k, n.support_size);
  const double c2 = c * c;
  return 2.0 * c2 * n.x_fro_sq * (n.n_fro_sq + n.m_fro_sq + 2.0 * c2) + n.approx +
         kl / lambda;
}

double theorem_radius(double s2, int ell, int p) {
  return std::sqrt(s2 / (static_cast<double>(ell) * p));
}

double bunea_rate(double sigma2, int rank_b, int rank_x, int m, double C) {
  if (!(sigma2 > 0.0) || !(C > 0.0) || rank_b < 0 || rank_x < 0 || m < 1) {
    throw DomainError("bunea_rate needs positive sigma2, C, m and nonnegative ranks");
  }
  return C * sigma2 * rank_b * static_cast<double>(rank_x + m);
}

BoundInputs oracle_inputs(const LowRankTruth& truth, const Matrix& X, double s2,
                          const Dims& dims) {
  const int k0 = truth.k0();
  if (k0 > dims.k) throw DimensionError("truth rank k0 exceeds k");
  BoundInputs in;
  in.M = Matrix::Zero(dims.p, dims.k);
  in.N = Matrix::Zero(dims.m, dims.k);
  in.M.leftCols(k0) = truth.M0;
  in.N.leftCols(k0) = truth.N0;
  in.B = truth.B;
  in.X = X;
  in.s2 = s2;
  in.dims = dims;
  for (int j = 0; j < k0; ++j) in.support.push_back(j);
  return in;
}

}  // namespace bayesrank
