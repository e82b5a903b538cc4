#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hwbf/models.hpp"
#include "hwbf/parallel.hpp"
#include "hwbf/random.hpp"

namespace hwbf {

struct SamplerSettings {
  int iterations = 2000;  // kept draws per chain
  int burn_in = 1000;
  int chains = 1;
  double target_accept = 0.234;
  int adapt_window = 50;
  bool independence_move = true;  // LKJ models: extra inverse-Wishart independence proposal
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Conditions the chain on a fixed within covariance; only theta is sampled.
  std::optional<Matrix> fixed_w;

  void validate() const {
    if (iterations < 100) throw Error(ErrorKind::BadConfig, "iterations must be at least 100");
    if (burn_in < 0) throw Error(ErrorKind::BadConfig, "burn_in must be non-negative");
    if (chains < 1) throw Error(ErrorKind::BadConfig, "chains must be at least 1");
    if (!(target_accept > 0.0 && target_accept < 1.0)) {
      throw Error(ErrorKind::BadConfig, "target acceptance must lie in (0, 1)");
    }
    if (adapt_window < 1) throw Error(ErrorKind::BadConfig, "adapt_window must be positive");
  }
};

/// Posterior draws on the unconstrained scale; chain c occupies rows
/// [c * per_chain, (c + 1) * per_chain).
struct PosteriorDraws {
  ModelId model = ModelId::M1;
  Matrix draws;
  Vector log_posterior;
  Vector log_jacobian;
  int chains = 1;
  int burn_in = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  double independence_acceptance = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::uint64_t> proposal_hash;  // per chain, frozen RWM proposal

  int size() const { return static_cast<int>(draws.rows()); }
  int dim() const { return static_cast<int>(draws.cols()); }
  int per_chain() const { return size() / chains; }
  Matrix chain(int c) const { return draws.middleRows(static_cast<Eigen::Index>(c) * per_chain(), per_chain()); }
};

namespace detail {

inline std::uint64_t hash_bytes(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t hash_matrix(const Matrix& m, std::uint64_t h = 1469598103934665603ULL) {
  return hash_bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), h);
}

/// log-Cholesky coordinates of W from its factor, row-major lower triangle.
inline void pack_log_cholesky(const Matrix& w_chol, double* out) {
  const auto p = w_chol.rows();
  int pos = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out[pos++] = i == j ? std::log(w_chol(i, i)) : w_chol(i, j);
  }
}

/// Mean-row design Gram matrix and cross-product; Normal models are the
/// one-row case.
struct MeanDesign {
  Matrix gram;   // rows x rows
  Matrix cross;  // rows x p
};

inline MeanDesign mean_design(const Problem& problem) {
  const auto& d = problem.data();
  if (is_manova(problem.model())) return {d.ctc, d.cty};
  Matrix gram(1, 1);
  gram(0, 0) = d.n;
  return {gram, static_cast<double>(d.n) * d.ybar.transpose()};
}

/// Draw of the mean rows given W under independent Normal priors N(mu_a, B_a):
/// precision blockdiag(B_a^{-1}) + kron(C^T C, W^{-1}).
inline Matrix draw_theta_hierarchical(const Problem& problem, const MeanDesign& md,
                                      const std::vector<Matrix>& b_inv, const Matrix& w_inv, Rng& rng) {
  const int p = problem.data().p;
  const int rows = problem.layout().rows;
  const int dim = rows * p;
  Matrix prec = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (int a = 0; a < rows; ++a) {
    prec.block(a * p, a * p, p, p) += b_inv[static_cast<std::size_t>(a)];
    rhs.segment(a * p, p) += b_inv[static_cast<std::size_t>(a)] * problem.row_means()[static_cast<std::size_t>(a)];
    rhs.segment(a * p, p) += w_inv * md.cross.row(a).transpose();
    for (int b = 0; b < rows; ++b) {
      if (md.gram(a, b) != 0.0) prec.block(a * p, b * p, p, p) += md.gram(a, b) * w_inv;
    }
  }
  const Matrix l = cholesky_lower(symmetrize(prec), "theta conditional precision");
  const Vector mean = l.transpose().triangularView<Eigen::Upper>().solve(l.triangularView<Eigen::Lower>().solve(rhs));
  const Vector x = mean + l.transpose().triangularView<Eigen::Upper>().solve(rng.normal_vector(dim));
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(x.data(), rows, p);
}

inline std::vector<Matrix> prior_precisions(const Problem& problem) {
  std::vector<Matrix> out;
  for (const auto& l : problem.row_cov_chols()) out.push_back(inverse_from_chol(l));
  return out;
}

/// Starting point: least-squares mean rows when identifiable, else prior means;
/// W from residuals blended with a prior guess.
inline Matrix initial_theta(const Problem& problem, const MeanDesign& md) {
  const int p = problem.data().p;
  const int rows = problem.layout().rows;
  Matrix theta(rows, p);
  for (int a = 0; a < rows; ++a) theta.row(a) = problem.row_means()[static_cast<std::size_t>(a)].transpose();
  if (problem.data().n > 0) {
    Eigen::LDLT<Matrix> ldlt(md.gram);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 1e-12).all()) {
      theta = ldlt.solve(md.cross);
    }
  }
  return theta;
}

inline Matrix initial_w(const Problem& problem, const Matrix& theta, const Matrix& prior_guess) {
  const auto& d = problem.data();
  const Matrix e = residual_scatter(problem.model(), theta, d);
  const double weight = d.p + 2.0;
  return symmetrize((e + weight * prior_guess) / (d.n + weight));
}

inline Matrix prior_w_guess(const Problem& problem) {
  const auto& h = problem.hyper();
  const int p = problem.data().p;
  if (h.U) return *h.U / std::max(*h.nu - p - 1.0, 1.0);
  return std::exp(2.0 * *h.upsilon) * Matrix::Identity(p, p);
}

/// Chain output in the unconstrained layout.
struct ChainOutput {
  Matrix draws;
  Vector log_posterior;
  Vector log_jacobian;
  double accepted = 0.0;
  double proposed = 0.0;
  double ind_accepted = 0.0;
  double ind_proposed = 0.0;
  std::uint64_t proposal_hash = 0;
};

inline void record_draw(const Problem& problem, ChainOutput& out, int t, const Vector& z) {
  out.draws.row(t) = z.transpose();
  const Constrained c = problem.constrain(z);
  out.log_jacobian(t) = c.log_jacobian;
  out.log_posterior(t) = problem.log_posterior(c);
}

inline Vector pack_iw_state(const Problem& problem, const Matrix& theta, const Matrix& w_chol) {
  const Layout& layout = problem.layout();
  Vector z(layout.dim());
  for (int a = 0; a < layout.rows; ++a) z.segment(a * layout.p, layout.p) = theta.row(a).transpose();
  pack_log_cholesky(w_chol, z.data() + layout.theta_dim());
  return z;
}

/// Gibbs chain for the hierarchical inverse-Wishart models.
inline ChainOutput gibbs_chain(const Problem& problem, const SamplerSettings& s, std::uint64_t seed) {
  Rng rng(seed);
  const auto& data = problem.data();
  const double nu = *problem.hyper().nu;
  const Matrix& u = *problem.hyper().U;
  const auto md = mean_design(problem);
  const auto b_inv = prior_precisions(problem);

  Matrix theta = initial_theta(problem, md);
  Matrix w_chol = s.fixed_w ? cholesky_lower(*s.fixed_w, "fixed W")
                            : cholesky_lower(initial_w(problem, theta, prior_w_guess(problem)), "initial W");
  ChainOutput out;
  out.draws.resize(s.iterations, problem.dim());
  out.log_posterior.resize(s.iterations);
  out.log_jacobian.resize(s.iterations);
  for (int t = 0; t < s.burn_in + s.iterations; ++t) {
    theta = draw_theta_hierarchical(problem, md, b_inv, inverse_from_chol(w_chol), rng);
    if (!s.fixed_w) {
      const Matrix e = residual_scatter(problem.model(), theta, data);
      w_chol = rng.inverse_wishart_chol(cholesky_lower(symmetrize(u + e), "W conditional scale"), nu + data.n);
    }
    if (t >= s.burn_in) record_draw(problem, out, t - s.burn_in, pack_iw_state(problem, theta, w_chol));
  }
  return out;
}

/// Independent draws from the conjugate posteriors of M1 and M4.
inline ChainOutput exact_conjugate_chain(const Problem& problem, const SamplerSettings& s, std::uint64_t seed) {
  Rng rng(seed);
  const auto& data = problem.data();
  const int p = data.p;
  ChainOutput out;
  out.draws.resize(s.iterations, problem.dim());
  out.log_posterior.resize(s.iterations);
  out.log_jacobian.resize(s.iterations);

  Matrix mean, k_chol, un_chol;
  double nun = 0.0;
  if (problem.model() == ModelId::M1) {
    const auto& h = problem.hyper();
    const double kn = *h.k0 + data.n;
    const Vector diff = data.ybar - *h.mu;
    mean = ((*h.k0 * *h.mu + data.n * data.ybar) / kn).transpose();
    k_chol = Matrix::Constant(1, 1, std::sqrt(kn));
    un_chol = cholesky_lower(symmetrize(*h.U + data.scatter + (*h.k0 * data.n / kn) * diff * diff.transpose()), "U_n");
    nun = *h.nu + data.n;
  } else {
    const auto post = m4_posterior(data, problem.hyper());
    mean = post.mn;
    k_chol = cholesky_lower(post.kn, "K_n");
    un_chol = cholesky_lower(post.un, "U_n");
    nun = post.nun;
  }
  const auto rows = mean.rows();
  for (int t = 0; t < s.iterations; ++t) {
    const Matrix w_chol = s.fixed_w ? cholesky_lower(*s.fixed_w, "fixed W") : rng.inverse_wishart_chol(un_chol, nun);
    Matrix z(rows, p);
    for (Eigen::Index i = 0; i < rows; ++i) z.row(i) = rng.normal_vector(p).transpose();
    // Theta = M_n + L_K^{-T} Z L_W^T  gives row covariance K_n^{-1} and column covariance W.
    const Matrix theta = mean + Matrix(k_chol.transpose().triangularView<Eigen::Upper>().solve(z)) * w_chol.transpose();
    record_draw(problem, out, t, pack_iw_state(problem, theta, w_chol));
  }
  out.accepted = out.proposed = s.iterations;
  return out;
}

/// Metropolis-within-Gibbs for the LogNormal-LKJ models.
class LkjChain {
 public:
  LkjChain(const Problem& problem, const SamplerSettings& s, std::uint64_t seed)
      : problem_(problem), s_(s), rng_(seed), p_(problem.data().p), d_(p_ + p_ * (p_ - 1) / 2) {}

  ChainOutput run() {
    const auto& data = problem_.data();
    const auto md = mean_design(problem_);
    const auto b_inv = prior_precisions(problem_);
    Matrix theta = initial_theta(problem_, md);
    Vector cov = s_.fixed_w ? cov_from_w(*s_.fixed_w) : cov_from_w(initial_w(problem_, theta, prior_w_guess(problem_)));

    ChainOutput out;
    out.draws.resize(s_.iterations, problem_.dim());
    out.log_posterior.resize(s_.iterations);
    out.log_jacobian.resize(s_.iterations);

    log_scale_ = std::log(2.38 / std::sqrt(static_cast<double>(d_)));
    prop_chol_ = 0.1 * Matrix::Identity(d_, d_);
    set_independence_proposal(p_ + 2.0, cov);
    std::vector<Vector> history;
    double accepted = 0.0, proposed = 0.0;

    // Burn-in: a warm-up phase, then one phase per candidate nu0 for the
    // independence proposal; the best candidate is frozen with the RWM state.
    const std::vector<double> candidates = {0.0, 4.0, 8.0, 16.0};
    const int warm = s_.burn_in * 2 / 5;
    const int phase = std::max(1, (s_.burn_in - warm) / static_cast<int>(candidates.size()));
    std::vector<double> cand_acc(candidates.size(), 0.0), cand_n(candidates.size(), 0.0);
    Block cur = block(cov);

    for (int t = 0; t < s_.burn_in + s_.iterations; ++t) {
      int cand = -1;
      if (s_.independence_move && t < s_.burn_in && t >= warm) {
        cand = std::min(static_cast<int>(candidates.size()) - 1, (t - warm) / phase);
        if ((t - warm) % phase == 0) {
          set_independence_proposal(candidates[static_cast<std::size_t>(cand)], mean_of(history, history.size() / 2, cov));
        }
      }
      if (s_.independence_move && t == s_.burn_in && s_.burn_in > 0) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < candidates.size(); ++c) {
          if (cand_acc[c] * cand_n[best] > cand_acc[best] * cand_n[c]) best = c;
        }
        const double nu0 = cand_n[best] > 0.0 ? candidates[best] : p_ + 2.0;
        set_independence_proposal(nu0, mean_of(history, history.size() / 2, cov));
      }

      theta = draw_theta_hierarchical(problem_, md, b_inv, cur.w_chol_inv.transpose() * cur.w_chol_inv, rng_);
      if (!s_.fixed_w) {
        const Matrix e = residual_scatter(problem_.model(), theta, data);
        // Random-walk move on the whole covariance block.
        const double lt = target(cur, e);
        const Vector prop = cov + std::exp(log_scale_) * (prop_chol_ * rng_.normal_vector(d_));
        Block next = block(prop);
        const double lp = target(next, e);
        const double alpha = std::isfinite(lp) ? std::min(0.0, lp - lt) : -INFINITY;
        const bool accept = std::log(rng_.uniform()) < alpha;
        if (accept) {
          cov = prop;
          cur = std::move(next);
        }
        if (t >= s_.burn_in) {
          accepted += accept;
          proposed += 1.0;
        } else {
          adapt(t, std::exp(alpha), cov, history);
        }
        if (s_.independence_move) {
          const bool ind = independence_move(cov, cur, e);
          if (t >= s_.burn_in) {
            ind_accepted_ += ind;
            ind_proposed_ += 1.0;
          } else if (cand >= 0) {
            cand_acc[static_cast<std::size_t>(cand)] += ind;
            cand_n[static_cast<std::size_t>(cand)] += 1.0;
          }
        }
      }
      if (t >= s_.burn_in) record_draw(problem_, out, t - s_.burn_in, pack(theta, cov));
    }
    out.accepted = accepted;
    out.proposed = proposed;
    out.ind_accepted = ind_accepted_;
    out.ind_proposed = ind_proposed_;
    out.proposal_hash = proposal_hash();
    return out;
  }

  std::uint64_t proposal_hash() const {
    std::uint64_t h = hash_matrix(prop_chol_, hash_bytes(&log_scale_, sizeof(double)));
    h = hash_bytes(&ind_nu0_, sizeof(double), h);
    return hash_bytes(ind_psi_.data(), sizeof(double) * static_cast<std::size_t>(ind_psi_.size()), h);
  }

 private:
  struct Block {
    Vector d;
    Matrix r_chol;
    Matrix w_chol;
    Matrix w_chol_inv;
    double log_jacobian = 0.0;
    double prior = 0.0;
    bool valid = false;
  };

  Block block(const Vector& cov) const {
    Block b;
    const Vector log_d = cov.head(p_);
    b.log_jacobian = log_d.sum();
    b.d = log_d.array().exp();
    b.r_chol = corr_chol_from_unconstrained(cov.data() + p_, p_, b.log_jacobian);
    b.w_chol = b.d.asDiagonal() * b.r_chol;
    complete(b);
    return b;
  }

  void complete(Block& b) const {
    b.valid = cov_is_finite(b);
    if (!b.valid) return;
    b.w_chol_inv = lower_inverse(b.w_chol);
    b.prior = prior_cov(b);
  }

  static bool cov_is_finite(const Block& b) {
    return b.w_chol.allFinite() && (b.w_chol.diagonal().array() > 0.0).all();
  }

  Vector cov_from_w(const Matrix& w) const {
    Vector cov(d_);
    const Vector d = w.diagonal().array().sqrt();
    const Matrix r = symmetrize(d.cwiseInverse().asDiagonal() * w * d.cwiseInverse().asDiagonal());
    cov.head(p_) = d.array().log();
    const Matrix l = cholesky_lower(r, "initial correlation");
    corr_chol_to_unconstrained(l, cov.data() + p_);
    return cov;
  }

  double prior_cov(const Block& b) const {
    const auto& h = problem_.hyper();
    double out = lkj_log_density_chol(b.r_chol, *h.eta);
    for (int k = 0; k < p_; ++k) out += lognormal_log_density(b.d(k), *h.upsilon, *h.sigma);
    return out;
  }

  double loglik(const Block& b, const Matrix& e) const {
    return -0.5 * problem_.data().n * logdet_from_chol(b.w_chol) - 0.5 * trace_inv_times_linv(b.w_chol_inv, e);
  }

  /// Conditional log density of the covariance block given theta, on the
  /// unconstrained scale.
  double target(const Block& b, const Matrix& e) const {
    if (!b.valid) return -INFINITY;
    const double v = loglik(b, e) + b.prior + b.log_jacobian;
    return std::isfinite(v) ? v : -INFINITY;
  }

  /// Same conditional as a density over W: the (D, R) -> W Jacobian is
  /// 2^p prod(d)^p.
  double target_on_w(const Block& b, const Matrix& e) const {
    if (!b.valid) return -INFINITY;
    return loglik(b, e) + b.prior - p_ * std::log(2.0) - p_ * b.d.array().log().sum();
  }

  /// Independence proposal W ~ IW(Psi + E, nu0 + n). Only the prior parts of
  /// target and proposal differ, so Psi (diagonal) is matched to the gradient of
  /// the LogNormal prior in log D at a reference state.
  void set_independence_proposal(double nu0, const Vector& ref_cov) {
    const auto& h = problem_.hyper();
    const Block b = block(ref_cov);
    if (!b.valid) return;
    const Vector w_inv_diag = (b.w_chol_inv.transpose() * b.w_chol_inv).diagonal();
    ind_nu0_ = nu0;
    ind_psi_.resize(p_);
    for (int k = 0; k < p_; ++k) {
      const double g = (std::log(b.d(k)) - *h.upsilon) / (*h.sigma * *h.sigma);
      ind_psi_(k) = std::max(nu0 - g, 0.5) / w_inv_diag(k);
    }
  }

  bool independence_move(Vector& cov, Block& cur, const Matrix& e) {
    const auto& data = problem_.data();
    const double dof = ind_nu0_ + data.n;
    if (!(dof > p_ - 1)) return false;
    Matrix psi = e;
    psi.diagonal() += ind_psi_;
    const Matrix psi_chol = cholesky_lower(symmetrize(psi), "independence proposal scale");
    Block nxt;
    nxt.w_chol = rng_.inverse_wishart_chol(psi_chol, dof);
    nxt.d = nxt.w_chol.rowwise().norm();
    nxt.r_chol = nxt.d.cwiseInverse().asDiagonal() * nxt.w_chol;
    complete(nxt);
    if (!nxt.valid) return false;
    const double log_q_cur = iw_log_density_chol(cur.w_chol, psi_chol, dof, &cur.w_chol_inv);
    const double log_q_new = iw_log_density_chol(nxt.w_chol, psi_chol, dof, &nxt.w_chol_inv);
    const double a = (target_on_w(nxt, e) - log_q_new) - (target_on_w(cur, e) - log_q_cur);
    if (!(std::isfinite(a) && std::log(rng_.uniform()) < a)) return false;
    Vector cov_new(d_);
    cov_new.head(p_) = nxt.d.array().log();
    corr_chol_to_unconstrained(nxt.r_chol, cov_new.data() + p_);
    if (!cov_new.allFinite()) return false;
    cov = cov_new;
    cur = block(cov);
    return true;
  }

  static Vector mean_of(const std::vector<Vector>& history, std::size_t from, const Vector& fallback) {
    if (from >= history.size()) return fallback;
    Vector m = Vector::Zero(fallback.size());
    for (std::size_t i = from; i < history.size(); ++i) m += history[i];
    return m / static_cast<double>(history.size() - from);
  }

  /// Robbins-Monro on the global scale; proposal shape switches from the
  /// initial diagonal to the empirical covariance of the burn-in history.
  void adapt(int t, double accept_prob, const Vector& cov, std::vector<Vector>& history) {
    const double gamma = 1.0 / std::pow(t + 1.0, 0.6);
    log_scale_ += gamma * (accept_prob - s_.target_accept);
    history.push_back(cov);
    const auto h = static_cast<int>(history.size());
    if (h >= 2 * s_.adapt_window && h % s_.adapt_window == 0 && h > d_ + 2) {
      const auto start = static_cast<std::size_t>(h / 2);
      Matrix x(static_cast<Eigen::Index>(history.size() - start), d_);
      for (std::size_t i = start; i < history.size(); ++i) x.row(static_cast<Eigen::Index>(i - start)) = history[i].transpose();
      Matrix c = sample_covariance(x);
      c.diagonal().array() += 1e-8 + 1e-6 * c.diagonal().mean();
      Eigen::LLT<Matrix> llt(c);
      if (llt.info() == Eigen::Success) prop_chol_ = llt.matrixL();
    }
  }

  Vector pack(const Matrix& theta, const Vector& cov) const {
    const Layout& layout = problem_.layout();
    Vector z(layout.dim());
    for (int a = 0; a < layout.rows; ++a) z.segment(a * p_, p_) = theta.row(a).transpose();
    z.tail(d_) = cov;
    return z;
  }

  const Problem& problem_;
  const SamplerSettings& s_;
  Rng rng_;
  int p_;
  int d_;
  double log_scale_ = 0.0;
  Matrix prop_chol_;
  double ind_accepted_ = 0.0;
  double ind_proposed_ = 0.0;
  double ind_nu0_ = 0.0;
  Vector ind_psi_;
};

inline PosteriorDraws assemble(ModelId model, const SamplerSettings& s, std::vector<ChainOutput>& outs) {
  PosteriorDraws pd;
  pd.model = model;
  pd.chains = s.chains;
  pd.burn_in = s.burn_in;
  pd.seed = s.seed;
  const auto per = outs.front().draws.rows();
  const auto dim = outs.front().draws.cols();
  pd.draws.resize(per * s.chains, dim);
  pd.log_posterior.resize(per * s.chains);
  pd.log_jacobian.resize(per * s.chains);
  double acc = 0.0, prop = 0.0, ind_acc = 0.0, ind_prop = 0.0;
  for (int c = 0; c < s.chains; ++c) {
    auto& o = outs[static_cast<std::size_t>(c)];
    pd.draws.middleRows(c * per, per) = o.draws;
    pd.log_posterior.segment(c * per, per) = o.log_posterior;
    pd.log_jacobian.segment(c * per, per) = o.log_jacobian;
    acc += o.accepted;
    prop += o.proposed;
    ind_acc += o.ind_accepted;
    ind_prop += o.ind_proposed;
    pd.proposal_hash.push_back(o.proposal_hash);
  }
  if (prop > 0.0) pd.acceptance_rate = acc / prop;
  if (ind_prop > 0.0) pd.independence_acceptance = ind_acc / ind_prop;
  return pd;
}

template <typename ChainFn>
PosteriorDraws run_chains(const Problem& problem, const SamplerSettings& s, ChainFn&& chain) {
  s.validate();
  std::vector<ChainOutput> outs(static_cast<std::size_t>(s.chains));
  parallel_for(outs.size(), s.jobs, [&](std::size_t c) { outs[c] = chain(problem, s, derive_seed(s.seed, {c})); });
  return assemble(problem.model(), s, outs);
}

}  // namespace detail

/// Gibbs sampler for M2 and M5: exact Normal conditional for the mean rows,
/// inverse-Wishart conditional for W.
inline PosteriorDraws gibbs_niw(const Problem& problem, const SamplerSettings& s) {
  if (problem.model() != ModelId::M2 && problem.model() != ModelId::M5) {
    throw Error(ErrorKind::BadModel, "gibbs_niw handles M2 and M5");
  }
  return detail::run_chains(problem, s, detail::gibbs_chain);
}

/// Metropolis-within-Gibbs for M3 and M6.
inline PosteriorDraws mwg_lkj(const Problem& problem, const SamplerSettings& s) {
  if (!is_lkj(problem.model())) throw Error(ErrorKind::BadModel, "mwg_lkj handles M3 and M6");
  return detail::run_chains(problem, s, [](const Problem& pr, const SamplerSettings& st, std::uint64_t seed) {
    return detail::LkjChain(pr, st, seed).run();
  });
}

/// Independent posterior draws for the conjugate models M1 and M4.
inline PosteriorDraws exact_conjugate(const Problem& problem, const SamplerSettings& s) {
  if (!is_conjugate(problem.model())) throw Error(ErrorKind::BadModel, "exact sampler handles M1 and M4");
  return detail::run_chains(problem, s, detail::exact_conjugate_chain);
}

inline PosteriorDraws sample_posterior(const Problem& problem, const SamplerSettings& s) {
  switch (problem.model()) {
    case ModelId::M1:
    case ModelId::M4: return exact_conjugate(problem, s);
    case ModelId::M2:
    case ModelId::M5: return gibbs_niw(problem, s);
    case ModelId::M3:
    case ModelId::M6: return mwg_lkj(problem, s);
  }
  throw Error(ErrorKind::BadModel, "unknown model");
}

inline std::string draws_to_csv(const PosteriorDraws& pd) {
  std::string out;
  for (int j = 0; j < pd.dim(); ++j) out += (j ? ",z" : "z") + std::to_string(j);
  out += ",log_posterior,log_jacobian\n";
  char buf[32];
  const auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
  };
  for (int t = 0; t < pd.size(); ++t) {
    for (int j = 0; j < pd.dim(); ++j) {
      if (j) out += ',';
      put(pd.draws(t, j));
    }
    out += ',';
    put(pd.log_posterior(t));
    out += ',';
    put(pd.log_jacobian(t));
    out += '\n';
  }
  return out;
}

}  // namespace hwbf
