#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hwbf/dataset.hpp"
#include "hwbf/densities.hpp"
#include "hwbf/linalg.hpp"

namespace hwbf {

/// M1-M3: Normal likelihood; M4-M6: MANOVA likelihood with dummy-coded
/// characters. Within each family: conjugate NIW, hierarchical NIW, and
/// Normal-LogNormal-LKJ priors.
enum class ModelId { M1 = 1, M2, M3, M4, M5, M6 };

inline constexpr std::array<ModelId, 6> kAllModels = {ModelId::M1, ModelId::M2, ModelId::M3,
                                                      ModelId::M4, ModelId::M5, ModelId::M6};

inline bool is_manova(ModelId m) { return static_cast<int>(m) >= 4; }
inline bool is_lkj(ModelId m) { return m == ModelId::M3 || m == ModelId::M6; }
inline bool is_conjugate(ModelId m) { return m == ModelId::M1 || m == ModelId::M4; }
inline bool uses_inverse_wishart(ModelId m) { return !is_lkj(m); }

inline std::string model_name(ModelId m) { return "M" + std::to_string(static_cast<int>(m)); }

inline std::string_view model_description(ModelId m) {
  switch (m) {
    case ModelId::M1: return "Normal, conjugate Normal-Inverse-Wishart";
    case ModelId::M2: return "Normal, hierarchical Normal-Inverse-Wishart";
    case ModelId::M3: return "Normal, Normal-LogNormal-LKJ";
    case ModelId::M4: return "MANOVA, conjugate Matrix-Normal-Inverse-Wishart";
    case ModelId::M5: return "MANOVA, hierarchical Normal-Inverse-Wishart";
    case ModelId::M6: return "MANOVA, Normal-LogNormal-LKJ";
  }
  return "";
}

inline ModelId parse_model(std::string_view s) {
  if (s.size() == 2 && (s[0] == 'M' || s[0] == 'm') && s[1] >= '1' && s[1] <= '6') {
    return static_cast<ModelId>(s[1] - '0');
  }
  throw Error(ErrorKind::BadModel, "unknown model '" + std::string(s) + "'");
}

/// Hyperparameters for one model. Only the fields the model uses are set.
struct PriorHyper {
  ModelId model = ModelId::M1;
  std::optional<Vector> mu;                     // M1-M3
  std::optional<std::vector<Vector>> mu_ell;    // M4-M6, row l of the prior mean matrix
  std::optional<Matrix> B;                      // M2, M3
  std::optional<std::vector<Matrix>> B_ell;     // M5, M6
  std::optional<Matrix> U;                      // M1, M2, M4, M5
  std::optional<double> nu;                     // M1, M2, M4, M5
  std::optional<double> k0;                     // M1
  std::optional<Vector> K0;                     // M4, diagonal of K0
  std::optional<double> upsilon;                // M3, M6
  std::optional<double> sigma;                  // M3, M6
  std::optional<double> eta;                    // M3, M6
  bool sigma_clamped = false;

  int p() const {
    if (mu) return static_cast<int>(mu->size());
    if (mu_ell && !mu_ell->empty()) return static_cast<int>(mu_ell->front().size());
    throw Error(ErrorKind::BadModel, "hyperparameters carry no prior mean");
  }

  /// Number of characters L in the MANOVA design.
  int labels() const { return mu_ell ? static_cast<int>(mu_ell->size()) : 1; }

  /// Field-relevance and value invariants for the model.
  void validate() const {
    const auto require = [&](bool present, bool wanted, const char* field) {
      if (present != wanted) {
        throw Error(ErrorKind::BadModel, model_name(model) + (wanted ? " requires " : " does not use ") +
                                             field);
      }
    };
    const ModelId m = model;
    require(mu.has_value(), !is_manova(m), "mu");
    require(mu_ell.has_value(), is_manova(m), "mu_ell");
    require(B.has_value(), m == ModelId::M2 || m == ModelId::M3, "B");
    require(B_ell.has_value(), m == ModelId::M5 || m == ModelId::M6, "B_ell");
    require(U.has_value(), uses_inverse_wishart(m), "U");
    require(nu.has_value(), uses_inverse_wishart(m), "nu");
    require(k0.has_value(), m == ModelId::M1, "k0");
    require(K0.has_value(), m == ModelId::M4, "K0");
    require(upsilon.has_value(), is_lkj(m), "upsilon");
    require(sigma.has_value(), is_lkj(m), "sigma");
    require(eta.has_value(), is_lkj(m), "eta");

    const int dim = p();
    if (U) {
      if (U->rows() != dim || U->cols() != dim) throw Error(ErrorKind::BadModel, "U has wrong shape");
      cholesky_lower(*U, "U");
      if (!(*nu >= dim + 2)) throw Error(ErrorKind::BadDof, "nu must be at least p + 2");
    }
    if (k0 && !(*k0 > 0.0)) throw Error(ErrorKind::BadModel, "k0 must be positive");
    if (K0) {
      if (K0->size() != labels()) throw Error(ErrorKind::BadModel, "K0 has wrong length");
      if (!(K0->array() > 0.0).all()) throw Error(ErrorKind::BadModel, "K0 must be positive");
    }
    if (B) cholesky_lower(*B, "B");
    if (B_ell && static_cast<int>(B_ell->size()) != labels()) {
      throw Error(ErrorKind::BadModel, "need one B_l per character");
    }
    if (sigma && !(*sigma > 0.0)) throw Error(ErrorKind::BadModel, "sigma must be positive");
    if (eta && !(*eta > 0.0)) throw Error(ErrorKind::BadModel, "eta must be positive");
  }
};

/// Response matrix plus the sufficient statistics every model needs.
struct ModelData {
  int p = 0;
  int n = 0;
  Matrix y;                    // n x p
  std::vector<int> character;  // per row, label index
  // Normal models
  Vector ybar;
  Matrix scatter;  // sum (y - ybar)(y - ybar)^T
  // MANOVA models: active rows of Theta are the reference plus every label present
  std::vector<int> rows;
  Matrix design;  // n x rows.size()
  Matrix ctc, cty, yty;
};

inline ModelData make_model_data(const Matrix& y, const std::vector<int>& character) {
  ModelData d;
  d.p = static_cast<int>(y.cols());
  d.n = static_cast<int>(y.rows());
  if (static_cast<int>(character.size()) != d.n) {
    throw Error(ErrorKind::BadValue, "one character label per row required");
  }
  d.y = y;
  d.character = character;
  d.ybar = d.n > 0 ? Vector(y.colwise().mean()) : Vector::Zero(d.p);
  const Matrix centered = y.rowwise() - d.ybar.transpose();
  d.scatter = centered.transpose() * centered;

  d.rows = {0};
  for (int c : character) {
    if (c < 0) throw Error(ErrorKind::BadLabel, "negative character index");
    if (std::find(d.rows.begin(), d.rows.end(), c) == d.rows.end()) d.rows.push_back(c);
  }
  std::sort(d.rows.begin(), d.rows.end());
  d.design = Matrix::Zero(d.n, static_cast<Eigen::Index>(d.rows.size()));
  for (int i = 0; i < d.n; ++i) {
    d.design(i, 0) = 1.0;
    const int c = character[static_cast<std::size_t>(i)];
    if (c > 0) {
      const auto col = std::find(d.rows.begin(), d.rows.end(), c) - d.rows.begin();
      d.design(i, col) = 1.0;
    }
  }
  d.ctc = d.design.transpose() * d.design;
  d.cty = d.design.transpose() * y;
  d.yty = y.transpose() * y;
  return d;
}

inline ModelData make_model_data(const Dataset& data) {
  std::vector<int> chars;
  chars.reserve(data.size());
  for (const auto& r : data.records()) chars.push_back(r.character);
  return make_model_data(data.feature_matrix(), chars);
}

/// Mean parameters (one row for Normal models, one row per active character
/// for MANOVA models) and the within covariance. LKJ models also carry the
/// standard deviations and correlation matrix with W = D R D.
struct ModelParams {
  Matrix theta;
  Matrix w;
  std::optional<Vector> d;
  std::optional<Matrix> r;
};

struct UnconstrainedVector {
  Vector z;
  double log_jacobian = 0.0;
};

/// Parameter layout on the unconstrained scale:
///   [theta rows (row-major) | covariance block]
/// covariance block = log-Cholesky of W (row-major lower triangle, log on the
/// diagonal) for inverse-Wishart models, or [log D | atanh of canonical partial
/// correlations (column-major)] for LKJ models.
struct Layout {
  ModelId model = ModelId::M1;
  int p = 0;
  int rows = 1;

  int theta_dim() const { return rows * p; }
  int cov_dim() const { return is_lkj(model) ? p + p * (p - 1) / 2 : p * (p + 1) / 2; }
  int dim() const { return theta_dim() + cov_dim(); }
};

inline Layout layout_for(ModelId model, const ModelData& data) {
  return {model, data.p, is_manova(model) ? static_cast<int>(data.rows.size()) : 1};
}

/// Constrained parameters together with the factors the densities need.
struct Constrained {
  ModelParams params;
  Matrix w_chol;
  Matrix r_chol;  // LKJ models only
  double log_jacobian = 0.0;
};

namespace detail {

/// log(1 - tanh(x)^2), stable for large |x|.
inline double log1m_tanh_sq(double x) {
  const double a = std::abs(x);
  return 2.0 * (std::log(2.0) - a - std::log1p(std::exp(-2.0 * a)));
}

/// Cholesky factor of a correlation matrix from canonical partial correlations
/// stored column-major below the diagonal. Adds the log-Jacobian of
/// z -> tanh(z) -> off-diagonal entries of R.
inline Matrix corr_chol_from_unconstrained(const double* z, int p, double& log_jac) {
  Matrix l = Matrix::Zero(p, p);
  Matrix cpc = Matrix::Zero(p, p);
  int pos = 0;
  for (int j = 0; j < p; ++j) {
    for (int i = j + 1; i < p; ++i) {
      const double x = z[pos++];
      cpc(i, j) = std::tanh(x);
      log_jac += (1.0 + 0.5 * (p - j - 2)) * log1m_tanh_sq(x);
    }
  }
  for (int i = 0; i < p; ++i) {
    double rem = 1.0;
    for (int j = 0; j < i; ++j) {
      l(i, j) = cpc(i, j) * std::sqrt(rem);
      rem -= l(i, j) * l(i, j);
    }
    l(i, i) = std::sqrt(std::max(rem, 0.0));
  }
  return l;
}

inline void corr_chol_to_unconstrained(const Matrix& l, double* z) {
  const auto p = static_cast<int>(l.rows());
  int pos = 0;
  for (int j = 0; j < p; ++j) {
    for (int i = j + 1; i < p; ++i) {
      double rem = 1.0;
      for (int k = 0; k < j; ++k) rem -= l(i, k) * l(i, k);
      const double cpc = std::clamp(l(i, j) / std::sqrt(rem), -1.0 + 1e-16, 1.0 - 1e-16);
      z[pos++] = std::atanh(cpc);
    }
  }
}

/// tr(W^{-1} E) given L^{-1}, with W = L L^T.
inline double trace_inv_times_linv(const Matrix& linv, const Matrix& e) {
  const auto p = e.rows();
  double out = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index k = 0; k <= i; ++k) {
      double s = 0.0;
      for (Eigen::Index l = 0; l <= i; ++l) s += e(k, l) * linv(i, l);
      out += linv(i, k) * s;
    }
  }
  return out;
}

/// tr(W^{-1} E) given the lower Cholesky factor of W.
inline double trace_inv_times(const Matrix& w_chol, const Matrix& e) {
  return trace_inv_times_linv(lower_inverse(w_chol), e);
}

/// Residual cross-product for the model's mean structure.
inline Matrix residual_scatter(ModelId model, const Matrix& theta, const ModelData& data) {
  if (!is_manova(model)) {
    const Vector diff = data.ybar - theta.row(0).transpose();
    return data.scatter + static_cast<double>(data.n) * diff * diff.transpose();
  }
  const Matrix cross = theta.transpose() * data.cty;
  return symmetrize(data.yty - cross - cross.transpose() + theta.transpose() * data.ctc * theta);
}

}  // namespace detail

inline Constrained from_unconstrained(const Layout& layout, const Vector& z) {
  const int p = layout.p;
  if (z.size() != layout.dim()) throw Error(ErrorKind::BadModel, "unconstrained vector has wrong length");
  Constrained c;
  c.params.theta = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      z.data(), layout.rows, p);
  int pos = layout.theta_dim();
  if (!is_lkj(layout.model)) {
    c.w_chol = Matrix::Zero(p, p);
    c.log_jacobian = p * std::log(2.0);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = z(pos++);
        if (i == j) {
          c.w_chol(i, i) = std::exp(v);
          c.log_jacobian += (p - i + 1) * v;
        } else {
          c.w_chol(i, j) = v;
        }
      }
    }
  } else {
    Vector log_d = z.segment(pos, p);
    pos += p;
    c.log_jacobian = log_d.sum();
    const Vector d = log_d.array().exp();
    c.r_chol = detail::corr_chol_from_unconstrained(z.data() + pos, p, c.log_jacobian);
    c.w_chol = d.asDiagonal() * c.r_chol;
    c.params.d = d;
    c.params.r = c.r_chol * c.r_chol.transpose();
  }
  c.params.w = c.w_chol * c.w_chol.transpose();
  return c;
}

inline UnconstrainedVector to_unconstrained(const Layout& layout, const ModelParams& params) {
  const int p = layout.p;
  if (params.theta.rows() != layout.rows || params.theta.cols() != p) {
    throw Error(ErrorKind::BadModel, "theta has wrong shape");
  }
  Vector z(layout.dim());
  for (int a = 0; a < layout.rows; ++a) z.segment(a * p, p) = params.theta.row(a).transpose();
  int pos = layout.theta_dim();
  if (!is_lkj(layout.model)) {
    const Matrix l = cholesky_lower(params.w, "W");
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) z(pos++) = i == j ? std::log(l(i, i)) : l(i, j);
    }
  } else {
    Vector d;
    Matrix r;
    if (params.d && params.r) {
      d = *params.d;
      r = *params.r;
    } else {
      d = params.w.diagonal().array().sqrt();
      r = d.cwiseInverse().asDiagonal() * params.w * d.cwiseInverse().asDiagonal();
    }
    check_correlation(symmetrize(r));
    z.segment(pos, p) = d.array().log();
    pos += p;
    Eigen::LLT<Matrix> llt(r);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::BadCorrelation, "R is not positive definite");
    detail::corr_chol_to_unconstrained(llt.matrixL(), z.data() + pos);
  }
  return {z, from_unconstrained(layout, z).log_jacobian};
}

inline Layout layout_for_params(ModelId model, const ModelParams& params) {
  return {model, static_cast<int>(params.theta.cols()), static_cast<int>(params.theta.rows())};
}

/// Sum over records of the p-variate Normal log density with mean theta
/// (Normal models) or Theta^T c (MANOVA models) and covariance W.
inline double log_likelihood_chol(ModelId model, const Matrix& theta, const Matrix& w_chol,
                                  const ModelData& data) {
  const Matrix e = detail::residual_scatter(model, theta, data);
  return -0.5 * data.n * data.p * kLog2Pi - 0.5 * data.n * logdet_from_chol(w_chol) -
         0.5 * detail::trace_inv_times(w_chol, e);
}

inline double log_likelihood(ModelId model, const ModelParams& params, const ModelData& data) {
  const int expected_rows = is_manova(model) ? static_cast<int>(data.rows.size()) : 1;
  if (params.theta.rows() != expected_rows || params.theta.cols() != data.p) {
    throw Error(ErrorKind::BadModel, "theta does not match the data layout");
  }
  return log_likelihood_chol(model, params.theta, cholesky_lower(params.w, "W"), data);
}

/// Hyperparameters with cached factorizations, restricted to the active rows
/// of a particular data set. This is the object samplers and the bridge
/// estimator evaluate.
class Problem {
 public:
  Problem(PriorHyper hyper, ModelData data) : hyper_(std::move(hyper)), data_(std::move(data)) {
    hyper_.validate();
    const int p = hyper_.p();
    if (p != data_.p) throw Error(ErrorKind::BadModel, "hyperparameter and data dimensions differ");
    layout_ = layout_for(hyper_.model, data_);
    const ModelId m = hyper_.model;
    if (is_manova(m)) {
      for (int row : data_.rows) {
        if (row >= hyper_.labels() || (*hyper_.mu_ell)[static_cast<std::size_t>(row)].size() != p) {
          throw Error(ErrorKind::MissingCell, "no prior for character '" +
                                                  std::string(row < kNumLabels ? kLabels[row] : "?") + "'");
        }
        row_mean_.push_back((*hyper_.mu_ell)[static_cast<std::size_t>(row)]);
        if (hyper_.B_ell) {
          row_cov_chol_.push_back(cholesky_lower((*hyper_.B_ell)[static_cast<std::size_t>(row)], "B_l"));
        }
        if (hyper_.K0) row_k0_.push_back((*hyper_.K0)(row));
      }
    } else {
      row_mean_.push_back(*hyper_.mu);
      if (hyper_.B) row_cov_chol_.push_back(cholesky_lower(*hyper_.B, "B"));
    }
    if (hyper_.U) u_chol_ = cholesky_lower(*hyper_.U, "U");
  }

  ModelId model() const { return hyper_.model; }
  const PriorHyper& hyper() const { return hyper_; }
  const ModelData& data() const { return data_; }
  const Layout& layout() const { return layout_; }
  int dim() const { return layout_.dim(); }
  const std::vector<Vector>& row_means() const { return row_mean_; }
  const std::vector<Matrix>& row_cov_chols() const { return row_cov_chol_; }
  const std::vector<double>& row_k0() const { return row_k0_; }
  const Matrix& u_chol() const { return u_chol_; }

  double log_likelihood(const Constrained& c) const {
    return log_likelihood_chol(model(), c.params.theta, c.w_chol, data_);
  }

  /// Prior on the mean rows given W.
  double log_prior_theta(const Matrix& theta, const Matrix& w_chol) const {
    double out = 0.0;
    const int p = data_.p;
    for (int a = 0; a < layout_.rows; ++a) {
      const Vector x = theta.row(a).transpose();
      if (model() == ModelId::M1 || model() == ModelId::M4) {
        const double k = model() == ModelId::M1 ? *hyper_.k0 : row_k0_[static_cast<std::size_t>(a)];
        const Vector zz = w_chol.triangularView<Eigen::Lower>().solve(x - row_mean_[static_cast<std::size_t>(a)]);
        out += -0.5 * p * kLog2Pi - 0.5 * logdet_from_chol(w_chol) + 0.5 * p * std::log(k) -
               0.5 * k * zz.squaredNorm();
      } else {
        out += mvn_log_density_chol(x, row_mean_[static_cast<std::size_t>(a)],
                                    row_cov_chol_[static_cast<std::size_t>(a)]);
      }
    }
    return out;
  }

  double log_prior_cov(const Constrained& c) const {
    if (!is_lkj(model())) return iw_log_density_chol(c.w_chol, u_chol_, *hyper_.nu);
    double out = lkj_log_density_chol(c.r_chol, *hyper_.eta);
    for (Eigen::Index k = 0; k < c.params.d->size(); ++k) {
      out += lognormal_log_density((*c.params.d)(k), *hyper_.upsilon, *hyper_.sigma);
    }
    return out;
  }

  double log_prior(const Constrained& c) const {
    return log_prior_theta(c.params.theta, c.w_chol) + log_prior_cov(c);
  }

  /// Unnormalized log posterior density on the unconstrained scale.
  double log_posterior(const Vector& z) const { return log_posterior(from_unconstrained(layout_, z)); }

  double log_posterior(const Constrained& c) const {
    if (!c.w_chol.allFinite() || !(c.w_chol.diagonal().array() > 0.0).all()) return -INFINITY;
    const double v = log_likelihood(c) + log_prior(c) + c.log_jacobian;
    return std::isfinite(v) ? v : -INFINITY;
  }

  Constrained constrain(const Vector& z) const { return from_unconstrained(layout_, z); }
  UnconstrainedVector unconstrain(const ModelParams& params) const {
    return to_unconstrained(layout_, params);
  }

 private:
  PriorHyper hyper_;
  ModelData data_;
  Layout layout_;
  std::vector<Vector> row_mean_;
  std::vector<Matrix> row_cov_chol_;
  std::vector<double> row_k0_;
  Matrix u_chol_;
};

/// Sum of the model's prior log densities at `params`. MANOVA parameters are
/// matched to the active rows of `data`.
inline double log_prior(const PriorHyper& hyper, const ModelParams& params, const ModelData& data) {
  const Problem problem(hyper, data);
  const Layout layout = problem.layout();
  return problem.log_prior(from_unconstrained(layout, to_unconstrained(layout, params).z));
}

/// Closed-form log marginal likelihood of the conjugate Normal model M1.
inline double closed_form_log_marginal_m1(const ModelData& data, const PriorHyper& hyper) {
  if (hyper.model != ModelId::M1) throw Error(ErrorKind::BadModel, "expected M1 hyperparameters");
  hyper.validate();
  const int p = data.p;
  const double n = data.n;
  const double k0 = *hyper.k0, nu = *hyper.nu;
  const double kn = k0 + n, nun = nu + n;
  const Vector diff = data.ybar - *hyper.mu;
  const Matrix un = symmetrize(*hyper.U + data.scatter + (k0 * n / kn) * diff * diff.transpose());
  return -0.5 * n * p * std::log(std::numbers::pi) + log_mvgamma(p, 0.5 * nun) -
         log_mvgamma(p, 0.5 * nu) + 0.5 * nu * logdet_spd(*hyper.U, "U") -
         0.5 * nun * logdet_spd(un, "U_n") + 0.5 * p * (std::log(k0) - std::log(kn));
}

/// Posterior parameters of the conjugate MANOVA model on the active rows.
struct MatrixNormalPosterior {
  Matrix kn, mn, un;
  double nun = 0.0;
  double logdet_k0 = 0.0;
};

inline MatrixNormalPosterior m4_posterior(const ModelData& data, const PriorHyper& hyper) {
  const auto la = static_cast<Eigen::Index>(data.rows.size());
  Vector k0(la);
  Matrix prior_mean(la, data.p);
  for (Eigen::Index a = 0; a < la; ++a) {
    const int row = data.rows[static_cast<std::size_t>(a)];
    if (row >= hyper.labels()) throw Error(ErrorKind::MissingCell, "no prior for a character in the data");
    k0(a) = (*hyper.K0)(row);
    prior_mean.row(a) = (*hyper.mu_ell)[static_cast<std::size_t>(row)].transpose();
  }
  MatrixNormalPosterior post;
  post.kn = data.ctc;
  post.kn.diagonal() += k0;
  const Matrix k_chol = cholesky_lower(post.kn, "K_n");
  const Matrix rhs = data.cty + k0.asDiagonal() * prior_mean;
  post.mn = k_chol.transpose().triangularView<Eigen::Upper>().solve(
      k_chol.triangularView<Eigen::Lower>().solve(rhs));
  post.un = symmetrize(*hyper.U + data.yty + prior_mean.transpose() * k0.asDiagonal() * prior_mean -
                       post.mn.transpose() * post.kn * post.mn);
  post.nun = *hyper.nu + data.n;
  post.logdet_k0 = k0.array().log().sum();
  return post;
}

/// Closed-form log marginal likelihood of the conjugate MANOVA model M4.
inline double closed_form_log_marginal_m4(const ModelData& data, const PriorHyper& hyper) {
  if (hyper.model != ModelId::M4) throw Error(ErrorKind::BadModel, "expected M4 hyperparameters");
  hyper.validate();
  const int p = data.p;
  const double n = data.n, nu = *hyper.nu;
  const auto post = m4_posterior(data, hyper);
  return -0.5 * n * p * std::log(std::numbers::pi) + log_mvgamma(p, 0.5 * post.nun) -
         log_mvgamma(p, 0.5 * nu) + 0.5 * nu * logdet_spd(*hyper.U, "U") -
         0.5 * post.nun * logdet_spd(post.un, "U_n") +
         0.5 * p * (post.logdet_k0 - logdet_spd(post.kn, "K_n"));
}

inline double closed_form_log_marginal(const ModelData& data, const PriorHyper& hyper) {
  switch (hyper.model) {
    case ModelId::M1: return closed_form_log_marginal_m1(data, hyper);
    case ModelId::M4: return closed_form_log_marginal_m4(data, hyper);
    default: throw Error(ErrorKind::BadModel, model_name(hyper.model) + " has no closed form");
  }
}

}  // namespace hwbf
