#pragma once

#include <cmath>

#include "hwbf/linalg.hpp"

namespace hwbf {

/// Inverse-Wishart log density, parameterized so that E[W] = U / (nu - p - 1).
/// Both factors are lower Cholesky factors.
/// `w_chol_inv` optionally supplies L_W^{-1}.
inline double iw_log_density_chol(const Matrix& w_chol, const Matrix& u_chol, double nu,
                                  const Matrix* w_chol_inv = nullptr) {
  const int p = static_cast<int>(w_chol.rows());
  // tr(U W^{-1}) = ||L_W^{-1} L_U||_F^2
  const Matrix a = w_chol_inv ? Matrix(w_chol_inv->triangularView<Eigen::Lower>() * u_chol)
                              : Matrix(w_chol.triangularView<Eigen::Lower>().solve(u_chol));
  return 0.5 * nu * logdet_from_chol(u_chol) - 0.5 * nu * p * std::log(2.0) -
         log_mvgamma(p, 0.5 * nu) - 0.5 * (nu + p + 1) * logdet_from_chol(w_chol) -
         0.5 * a.squaredNorm();
}

inline double iw_log_density(const Matrix& w, const Matrix& u, double nu) {
  const auto p = w.rows();
  if (!(nu > p - 1)) throw Error(ErrorKind::BadDof, "inverse-Wishart dof must exceed p - 1");
  return iw_log_density_chol(cholesky_lower(w, "W"), cholesky_lower(u, "U"), nu);
}

/// log of the LKJ normalizing constant c, with density |R|^{eta-1} / c.
inline double lkj_log_normalizer(double eta, int p) {
  double out = 0.0;
  for (int k = 1; k <= p - 1; ++k) {
    const double b = eta + 0.5 * (p - k - 1);
    const double log_beta = 2.0 * std::lgamma(b) - std::lgamma(2.0 * b);
    out += (2.0 * eta - 2.0 + p - k) * (p - k) * std::log(2.0) + (p - k) * log_beta;
  }
  return out;
}

inline void check_correlation(const Matrix& r) {
  const auto p = r.rows();
  if (r.cols() != p) throw Error(ErrorKind::BadCorrelation, "matrix is not square");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-8) throw Error(ErrorKind::BadCorrelation, "diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-10 || !(std::abs(r(i, j)) < 1.0)) {
        throw Error(ErrorKind::BadCorrelation, "entries must be symmetric and inside (-1, 1)");
      }
    }
  }
}

/// LKJ(eta) log density given the lower Cholesky factor of R.
inline double lkj_log_density_chol(const Matrix& r_chol, double eta) {
  return (eta - 1.0) * logdet_from_chol(r_chol) -
         lkj_log_normalizer(eta, static_cast<int>(r_chol.rows()));
}

inline double lkj_log_density(const Matrix& r, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::BadCorrelation, "eta must be positive");
  check_correlation(r);
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::BadCorrelation, "R is not positive definite");
  return lkj_log_density_chol(llt.matrixL(), eta);
}

/// log LogNormal(x | location, scale), i.e. log x ~ N(location, scale^2).
inline double lognormal_log_density(double x, double location, double scale) {
  if (!(x > 0.0)) return -INFINITY;
  const double z = (std::log(x) - location) / scale;
  return -std::log(x) - std::log(scale) - 0.5 * kLog2Pi - 0.5 * z * z;
}

}  // namespace hwbf
