#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hwbf/parallel.hpp"
#include "hwbf/random.hpp"
#include "hwbf/sampler.hpp"

namespace hwbf {

/// Gaussian proposal fitted to posterior draws.
struct Proposal {
  Vector mean;
  Matrix chol;
  bool warp = false;

  int dim() const { return static_cast<int>(mean.size()); }

  double log_density(const Vector& x) const { return mvn_log_density_chol(x, mean, chol); }
  Vector sample(Rng& rng) const { return rng.mvn(mean, chol); }
};

inline constexpr double kProposalRidge = 1e-8;

inline Proposal fit_proposal(const Matrix& draws, bool warp = false) {
  const auto d = draws.cols();
  if (draws.rows() < d + 2) {
    throw Error(ErrorKind::NeedMoreDraws, "proposal needs at least d + 2 draws, got " +
                                              std::to_string(draws.rows()));
  }
  Proposal g;
  g.mean = draws.colwise().mean();
  Matrix cov = symmetrize(sample_covariance(draws));
  cov.diagonal().array() += kProposalRidge;
  g.chol = cholesky_lower(cov, "proposal covariance");
  g.warp = warp;
  return g;
}

struct BridgeSettings {
  double tol = 1e-10;
  int max_iter = 1000;
  bool warp = false;

  void validate() const {
    if (!(tol > 0.0)) throw Error(ErrorKind::BadConfig, "bridge tolerance must be positive");
    if (max_iter < 1) throw Error(ErrorKind::BadConfig, "bridge max_iter must be positive");
  }
};

struct BridgeResult {
  double log_ml = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  double relative_change = INFINITY;  // |delta log m| at stop
  int t1 = 0;
  int t2 = 0;
};

using LogDensity = std::function<double(const Vector&)>;

namespace detail {

inline double finite_or_neg_inf(double v) { return std::isfinite(v) ? v : -INFINITY; }

/// Mean-reflection symmetrization of the target about the proposal mean.
inline double warped(const LogDensity& log_q, const Proposal& g, const Vector& x, double q_at_x) {
  const Vector mirror = 2.0 * g.mean - x;
  return log_add_exp(finite_or_neg_inf(q_at_x), finite_or_neg_inf(log_q(mirror))) - std::log(2.0);
}

inline double log_mean_exp(const std::vector<double>& v) {
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

}  // namespace detail

/// Iterative optimal bridge estimate of log of the integral of exp(log_q).
/// `post` holds draws from the normalized target and `post_log_q` optionally
/// caches log_q at them.
inline BridgeResult bridge_estimate(const LogDensity& log_q, const Proposal& g, const Matrix& post,
                                    const Vector* post_log_q, int t2, const BridgeSettings& s,
                                    std::uint64_t seed) {
  s.validate();
  const auto t1 = static_cast<int>(post.rows());
  if (t1 < 1 || t2 < 1) throw Error(ErrorKind::NeedMoreDraws, "bridge sampling needs draws from both sides");
  Rng rng(seed);

  std::vector<double> l1(static_cast<std::size_t>(t1)), l2(static_cast<std::size_t>(t2));
  for (int i = 0; i < t1; ++i) {
    const Vector x = post.row(i).transpose();
    double q = post_log_q ? (*post_log_q)(i) : log_q(x);
    if (g.warp) q = detail::warped(log_q, g, x, q);
    l1[static_cast<std::size_t>(i)] = detail::finite_or_neg_inf(q) - g.log_density(x);
  }
  bool any_finite = false;
  for (int j = 0; j < t2; ++j) {
    const Vector x = g.sample(rng);
    double q = log_q(x);
    if (g.warp) q = detail::warped(log_q, g, x, q);
    const double v = detail::finite_or_neg_inf(q) - g.log_density(x);
    l2[static_cast<std::size_t>(j)] = detail::finite_or_neg_inf(v);
    any_finite = any_finite || std::isfinite(l2[static_cast<std::size_t>(j)]);
  }
  if (!any_finite) throw Error(ErrorKind::EstimatorDegenerate, "target is non-finite at every proposal draw");

  const double log_s1 = std::log(static_cast<double>(t1) / (t1 + t2));
  const double log_s2 = std::log(static_cast<double>(t2) / (t1 + t2));
  BridgeResult r;
  r.t1 = t1;
  r.t2 = t2;
  double log_m = detail::log_mean_exp(l2);
  std::vector<double> num(l2.size()), den(l1.size());
  for (int it = 1; it <= s.max_iter; ++it) {
    for (std::size_t j = 0; j < l2.size(); ++j) {
      num[j] = l2[j] == -INFINITY ? -INFINITY : l2[j] - log_add_exp(log_s1 + l2[j], log_s2 + log_m);
    }
    for (std::size_t i = 0; i < l1.size(); ++i) den[i] = -log_add_exp(log_s1 + l1[i], log_s2 + log_m);
    const double next = detail::log_mean_exp(num) - detail::log_mean_exp(den);
    r.iterations = it;
    if (!std::isfinite(next)) throw Error(ErrorKind::EstimatorDegenerate, "bridge iteration diverged");
    r.relative_change = std::abs(next - log_m);
    log_m = next;
    if (r.relative_change < s.tol) {
      r.converged = true;
      break;
    }
  }
  r.log_ml = log_m;
  return r;
}

/// First half of every chain fits the proposal, second half feeds the estimator.
struct DrawSplit {
  Matrix first;
  Matrix second;
  Vector second_log_q;
};

inline DrawSplit split_draws(const PosteriorDraws& pd) {
  const int per = pd.per_chain();
  const int h1 = per / 2, h2 = per - per / 2;
  DrawSplit s;
  s.first.resize(static_cast<Eigen::Index>(h1) * pd.chains, pd.dim());
  s.second.resize(static_cast<Eigen::Index>(h2) * pd.chains, pd.dim());
  s.second_log_q.resize(static_cast<Eigen::Index>(h2) * pd.chains);
  for (int c = 0; c < pd.chains; ++c) {
    const auto base = static_cast<Eigen::Index>(c) * per;
    s.first.middleRows(c * h1, h1) = pd.draws.middleRows(base, h1);
    s.second.middleRows(c * h2, h2) = pd.draws.middleRows(base + h1, h2);
    s.second_log_q.segment(c * h2, h2) = pd.log_posterior.segment(base + h1, h2);
  }
  return s;
}

/// Bridge estimate of the marginal likelihood of `problem` from posterior draws.
inline BridgeResult bridge_from_draws(const Problem& problem, const PosteriorDraws& pd, const BridgeSettings& s,
                                      std::uint64_t seed) {
  const auto split = split_draws(pd);
  const Proposal g = fit_proposal(split.first, s.warp);
  const LogDensity log_q = [&problem](const Vector& z) { return problem.log_posterior(z); };
  return bridge_estimate(log_q, g, split.second, &split.second_log_q, static_cast<int>(split.second.rows()), s,
                         seed);
}

struct RepeatedBridge {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double mce = std::numeric_limits<double>::quiet_NaN();  // SD across runs; NaN with one run
  std::vector<double> values;
  std::vector<BridgeResult> results;
  int failed = 0;
  int not_converged = 0;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
};

/// `runs` independent sampler + bridge pipelines with derived seeds.
inline RepeatedBridge repeated_bridge(const Problem& problem, int runs, const SamplerSettings& sampler,
                                      const BridgeSettings& bridge, std::uint64_t seed, int jobs = 1) {
  if (runs < 1) throw Error(ErrorKind::BadConfig, "runs must be at least 1");
  std::vector<std::optional<BridgeResult>> out(static_cast<std::size_t>(runs));
  std::vector<double> acc(static_cast<std::size_t>(runs), std::numeric_limits<double>::quiet_NaN());
  parallel_for(out.size(), jobs, [&](std::size_t r) {
    SamplerSettings s = sampler;
    s.seed = derive_seed(seed, {r, 0});
    s.jobs = 1;
    try {
      const auto pd = sample_posterior(problem, s);
      acc[r] = pd.acceptance_rate;
      out[r] = bridge_from_draws(problem, pd, bridge, derive_seed(seed, {r, 1}));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EstimatorDegenerate) throw;
    }
  });
  RepeatedBridge rb;
  double acc_sum = 0.0;
  int acc_n = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (!out[r]) {
      ++rb.failed;
      continue;
    }
    rb.results.push_back(*out[r]);
    rb.values.push_back(out[r]->log_ml);
    rb.not_converged += !out[r]->converged;
    if (std::isfinite(acc[r])) {
      acc_sum += acc[r];
      ++acc_n;
    }
  }
  if (rb.values.empty()) throw Error(ErrorKind::EstimatorDegenerate, "every bridge run degenerated");
  if (acc_n) rb.acceptance_rate = acc_sum / acc_n;
  const auto k = static_cast<double>(rb.values.size());
  double sum = 0.0;
  for (double v : rb.values) sum += v;
  rb.mean = sum / k;
  if (rb.values.size() >= 2) {
    double ss = 0.0;
    for (double v : rb.values) ss += (v - rb.mean) * (v - rb.mean);
    rb.mce = std::sqrt(ss / (k - 1.0));
  }
  return rb;
}

}  // namespace hwbf
