#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "hwbf/linalg.hpp"

namespace hwbf {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic seed for a sub-stream identified by a sequence of indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(seed);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  Vector normal_vector(Eigen::Index d) {
    Vector z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal();
    return z;
  }

  /// mean + chol * z with z standard normal.
  Vector mvn(const Vector& mean, const Matrix& chol) {
    return mean + chol.triangularView<Eigen::Lower>() * normal_vector(mean.size());
  }

  /// Bartlett factor A: lower triangular with A_ii^2 ~ chi2(dof - i), A_ij ~ N(0,1).
  Matrix bartlett(int p, double dof) {
    Matrix a = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      a(i, i) = std::sqrt(chi_squared(dof - i));
      for (int j = 0; j < i; ++j) a(i, j) = normal();
    }
    return a;
  }

  /// Wishart(scale, dof) draw given the lower Cholesky factor of the scale.
  Matrix wishart(const Matrix& scale_chol, double dof) {
    const Matrix m = scale_chol * bartlett(static_cast<int>(scale_chol.rows()), dof);
    return m * m.transpose();
  }

  /// Inverse-Wishart(psi, dof) draw (mean psi / (dof - p - 1)), via the inverse
  /// of a Wishart(psi^{-1}, dof) draw. Returns a lower Cholesky factor of the draw.
  Matrix inverse_wishart_chol(const Matrix& psi_chol, double dof) {
    const int p = static_cast<int>(psi_chol.rows());
    const Matrix a = bartlett(p, dof);
    // W = (L_psi A^{-T}) (L_psi A^{-T})^T; A^{-T} is upper triangular.
    const Matrix a_inv_t =
        a.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p)).transpose();
    const Matrix g = psi_chol * a_inv_t;
    return cholesky_lower(g * g.transpose(), "inverse-Wishart draw");
  }

  Matrix inverse_wishart(const Matrix& psi_chol, double dof) {
    const Matrix l = inverse_wishart_chol(psi_chol, dof);
    return l * l.transpose();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hwbf
