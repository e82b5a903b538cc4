#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hwbf/core.hpp"

namespace hwbf {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Lower Cholesky factor; throws BadCovariance when the matrix is not PD.
inline Matrix cholesky_lower(const Matrix& m, const char* what = "matrix") {
  const auto n = m.rows();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> l =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::BadCovariance, std::string(what) + " is not positive definite");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

/// log|A| from a lower Cholesky factor of A.
inline double logdet_from_chol(const Matrix& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

inline double logdet_spd(const Matrix& m, const char* what = "matrix") {
  return logdet_from_chol(cholesky_lower(m, what));
}

/// Inverse of a lower triangular matrix.
inline Matrix lower_inverse(const Matrix& l) {
  const auto n = l.rows();
  Matrix x = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j, j) = 1.0 / l(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index k = j; k < i; ++k) s += l(i, k) * x(k, j);
      x(i, j) = -s / l(i, i);
    }
  }
  return x;
}

/// A^{-1} from a lower Cholesky factor of A.
inline Matrix inverse_from_chol(const Matrix& l) {
  const Matrix linv = lower_inverse(l);
  return linv.transpose() * linv;
}

/// log Gamma_p(a), the multivariate gamma function.
inline double log_mvgamma(int p, double a) {
  double out = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= p; ++j) out += std::lgamma(a + 0.5 * (1 - j));
  return out;
}

/// log N(x | mean, cov) given the lower Cholesky factor of cov.
inline double mvn_log_density_chol(const Vector& x, const Vector& mean, const Matrix& chol) {
  const Vector z = chol.triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * x.size() * kLog2Pi - 0.5 * logdet_from_chol(chol) - 0.5 * z.squaredNorm();
}

inline double mvn_log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
  return mvn_log_density_chol(x, mean, cholesky_lower(cov, "covariance"));
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

template <typename Range>
double log_sum_exp(const Range& values) {
  double hi = -INFINITY;
  for (double v : values) hi = std::max(hi, v);
  if (hi == -INFINITY) return -INFINITY;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

/// Sample covariance of the rows of x (n-1 denominator).
inline Matrix sample_covariance(const Matrix& x) {
  const Vector mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean.transpose();
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

}  // namespace hwbf
