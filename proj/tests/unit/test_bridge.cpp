#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "hwbf/bridge.hpp"

using namespace hwbf;
using fixtures::hyper;
using fixtures::random_data;

namespace {

double sd(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1.0));
}

// Student-t with 5 dof, unnormalized; exact log normalizer below.
constexpr double kDof = 5.0;
double log_t5(const Vector& x) { return -0.5 * (kDof + 1) * std::log1p(x(0) * x(0) / kDof); }
const double kLogT5Const =
    0.5 * std::log(kDof * M_PI) + std::lgamma(kDof / 2) - std::lgamma((kDof + 1) / 2);

Matrix t5_draws(Rng& rng, int n) {
  Matrix x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = rng.normal() / std::sqrt(rng.chi_squared(kDof) / kDof);
  return x;
}

// One bridge estimate of the t normalizer from fresh draws.
double t5_estimate(std::uint64_t seed, int t) {
  Rng rng(seed);
  const Proposal g = fit_proposal(t5_draws(rng, t));
  return bridge_estimate(log_t5, g, t5_draws(rng, t), nullptr, t, {}, seed + 1).log_ml;
}

SamplerSettings sampler(int iterations, int burn_in) {
  SamplerSettings s;
  s.iterations = iterations;
  s.burn_in = burn_in;
  s.chains = 2;
  return s;
}

}  // namespace

TEST(Bridge, StandardNormalConstant) {
  Rng rng(1);
  Matrix fit(5000, 1), post(5000, 1);
  for (int i = 0; i < 5000; ++i) {
    fit(i, 0) = rng.normal();
    post(i, 0) = rng.normal();
  }
  const LogDensity log_q = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  const auto r = bridge_estimate(log_q, fit_proposal(fit), post, nullptr, 5000, {}, 2);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.log_ml, 0.5 * std::log(2 * M_PI), 0.01);
}

TEST(Bridge, HeavyTailedConstant) {
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 10; ++s) v.push_back(t5_estimate(100 + 7 * s, 4000));
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  EXPECT_NEAR(mean, kLogT5Const, 4 * sd(v) / std::sqrt(v.size()) + 1e-3);
}

TEST(Bridge, ErrorShrinksWithMoreDraws) {
  std::vector<double> small, large;
  for (std::uint64_t s = 0; s < 40; ++s) {
    small.push_back(t5_estimate(1000 + 11 * s, 400));
    large.push_back(t5_estimate(5000 + 11 * s, 1600));
  }
  // four times the draws should roughly halve the spread
  const double ratio = sd(large) / sd(small);
  EXPECT_GE(ratio, 0.3);
  EXPECT_LE(ratio, 0.8);
}

TEST(Bridge, PermutingPosteriorDrawsDoesNotMatter) {
  Rng rng(3);
  const Matrix fit = t5_draws(rng, 500);
  const Matrix post = t5_draws(rng, 500);
  std::vector<int> idx(500);
  std::iota(idx.begin(), idx.end(), 0);
  std::reverse(idx.begin(), idx.end());
  const Matrix permuted = post(idx, Eigen::all);
  const Proposal g = fit_proposal(fit);
  const double a = bridge_estimate(log_t5, g, post, nullptr, 500, {}, 4).log_ml;
  const double b = bridge_estimate(log_t5, g, permuted, nullptr, 500, {}, 4).log_ml;
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(Bridge, DegenerateTarget) {
  Rng rng(5);
  const Proposal g = fit_proposal(t5_draws(rng, 100));
  const LogDensity nowhere = [](const Vector&) { return -INFINITY; };
  try {
    bridge_estimate(nowhere, g, t5_draws(rng, 100), nullptr, 100, {}, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EstimatorDegenerate);
  }
  EXPECT_THROW(bridge_estimate(log_t5, g, Matrix(0, 1), nullptr, 100, {}, 6), Error);
}

TEST(Proposal, RidgeAndMinimumDraws) {
  Matrix x(4, 2);
  x << 1, 3, 2, 3, 3, 3, 4, 3;
  const Proposal g = fit_proposal(x);
  EXPECT_NEAR(g.mean(1), 3.0, 1e-15);
  EXPECT_NEAR(g.chol(1, 1), std::sqrt(kProposalRidge), 1e-12);
  EXPECT_NEAR(g.chol(0, 0), std::sqrt(5.0 / 3.0 + kProposalRidge), 1e-12);
  try {
    fit_proposal(x.topRows(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NeedMoreDraws);
  }
}

TEST(Bridge, SplitKeepsChainHalves) {
  PosteriorDraws pd;
  pd.chains = 2;
  pd.draws = Matrix(10, 1);
  pd.log_posterior = Vector(10);
  for (int i = 0; i < 10; ++i) pd.draws(i, 0) = pd.log_posterior(i) = i;
  const auto s = split_draws(pd);
  EXPECT_EQ(s.first.col(0), (Vector(4) << 0, 1, 5, 6).finished());
  EXPECT_EQ(s.second.col(0), (Vector(6) << 2, 3, 4, 7, 8, 9).finished());
  EXPECT_EQ(s.second_log_q, s.second.col(0));
}

class ConjugateBridge : public ::testing::TestWithParam<ModelId> {};

TEST_P(ConjugateBridge, MatchesClosedForm) {
  Rng rng(7);
  const ModelId m = GetParam();
  const auto d = random_data(rng, 12, 2, is_manova(m) ? 2 : 1);
  const Problem problem(hyper(m, 2, 2), d);
  const auto rb = repeated_bridge(problem, 8, sampler(1000, 0), {}, 11);
  EXPECT_EQ(rb.failed, 0);
  EXPECT_EQ(rb.values.size(), 8u);
  EXPECT_GT(rb.mce, 0.0);
  EXPECT_NEAR(rb.mean, closed_form_log_marginal(d, problem.hyper()), 3 * rb.mce);
}

INSTANTIATE_TEST_SUITE_P(Models, ConjugateBridge, ::testing::Values(ModelId::M1, ModelId::M4),
                         [](const auto& info) { return model_name(info.param); });

TEST(RepeatedBridge, SpreadNeedsTwoRuns) {
  Rng rng(8);
  const Problem problem(hyper(ModelId::M2, 2), random_data(rng, 10, 2));
  const auto one = repeated_bridge(problem, 1, sampler(300, 100), {}, 3);
  EXPECT_TRUE(std::isnan(one.mce));
  EXPECT_TRUE(std::isfinite(one.mean));
  const auto two = repeated_bridge(problem, 2, sampler(300, 100), {}, 3);
  EXPECT_TRUE(std::isfinite(two.mce));
  EXPECT_EQ(two.values.front(), one.values.front());
  EXPECT_THROW(repeated_bridge(problem, 0, sampler(300, 100), {}, 3), Error);
}

TEST(RepeatedBridge, ParallelRunsMatchSerial) {
  Rng rng(9);
  const Problem problem(hyper(ModelId::M3, 2), random_data(rng, 10, 2));
  const auto serial = repeated_bridge(problem, 3, sampler(300, 200), {}, 5, 1);
  const auto parallel = repeated_bridge(problem, 3, sampler(300, 200), {}, 5, 3);
  EXPECT_EQ(serial.values, parallel.values);
}

TEST(BridgeSettings, Validation) {
  BridgeSettings s;
  s.tol = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.max_iter = 0;
  EXPECT_THROW(s.validate(), Error);
}
