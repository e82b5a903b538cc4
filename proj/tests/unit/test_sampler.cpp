#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "hwbf/diagnostics.hpp"
#include "hwbf/sampler.hpp"
#include "hwbf/synth.hpp"

using namespace hwbf;
using fixtures::hyper;
using fixtures::random_data;
using fixtures::random_spd;

namespace {

SamplerSettings settings(int iterations, int burn_in, std::uint64_t seed = 1, int chains = 1) {
  SamplerSettings s;
  s.iterations = iterations;
  s.burn_in = burn_in;
  s.seed = seed;
  s.chains = chains;
  return s;
}

// Columns of the theta block, one row per draw.
Matrix theta_draws(const PosteriorDraws& pd, int p, int row = 0) { return pd.draws.middleCols(row * p, p); }

void expect_mean_within(const Matrix& draws, const Vector& target, double k, const char* what) {
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    const Vector col = draws.col(j);
    const double se = std::sqrt((col.array() - col.mean()).square().sum() / (col.size() - 1.0) /
                                effective_sample_size(col));
    EXPECT_LT(std::abs(col.mean() - target(j)), k * se) << what << " coordinate " << j;
  }
}

}  // namespace

TEST(Gibbs, NoDataRecoversPrior) {
  const int p = 2;
  const auto h = hyper(ModelId::M2, p);
  const auto d = make_model_data(Matrix(0, p), {});
  const auto pd = gibbs_niw(Problem(h, d), settings(8000, 100));
  expect_mean_within(theta_draws(pd, p), *h.mu, 4.0, "prior mean");
}

TEST(Gibbs, FlatPriorLimitCentresOnSampleMean) {
  Rng rng(2);
  const int p = 3;
  auto h = hyper(ModelId::M2, p);
  h.B = 1e8 * Matrix::Identity(p, p);
  const auto d = random_data(rng, 15, p);
  const auto pd = gibbs_niw(Problem(h, d), settings(6000, 500));
  expect_mean_within(theta_draws(pd, p), d.ybar, 4.0, "flat prior");
}

TEST(Gibbs, FixedWithinMatchesExactConditional) {
  Rng rng(3);
  const int p = 2;
  const auto h = hyper(ModelId::M2, p);
  const auto d = random_data(rng, 6, p);
  const Matrix w = random_spd(rng, p);
  auto s = settings(20000, 0);
  s.fixed_w = w;
  const auto pd = gibbs_niw(Problem(h, d), s);

  const Matrix b_inv = h.B->inverse(), w_inv = w.inverse();
  const Matrix cov = (b_inv + d.n * w_inv).inverse();
  const Vector mean = cov * (b_inv * *h.mu + w_inv * (d.n * d.ybar));
  const Matrix th = theta_draws(pd, p);
  expect_mean_within(th, mean, 4.0, "conditional mean");
  const Matrix centred = th.rowwise() - th.colwise().mean();
  const Matrix emp = centred.transpose() * centred / (th.rows() - 1.0);
  for (int i = 0; i < p; ++i) {
    // variance estimate SE is about var * sqrt(2 / T)
    EXPECT_NEAR(emp(i, i), cov(i, i), 4 * cov(i, i) * std::sqrt(2.0 / th.rows()));
  }
}

TEST(Gibbs, ManovaFixedWithinMatchesExactConditional) {
  Rng rng(4);
  const int p = 2;
  const auto h = hyper(ModelId::M5, p, 2);
  const auto d = random_data(rng, 8, p, 2);
  const Matrix w = random_spd(rng, p);
  auto s = settings(20000, 0);
  s.fixed_w = w;
  const auto pd = gibbs_niw(Problem(h, d), s);

  // joint Normal conditional of vec(Theta) written out with Kronecker products
  const int dim = 2 * p;
  Matrix prec = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  const Matrix w_inv = w.inverse();
  for (int a = 0; a < 2; ++a) {
    const Matrix bi = (*h.B_ell)[a].inverse();
    prec.block(a * p, a * p, p, p) += bi;
    rhs.segment(a * p, p) += bi * (*h.mu_ell)[a];
  }
  for (int i = 0; i < d.n; ++i) {
    Vector c(2);
    c << 1.0, d.character[i] == 1 ? 1.0 : 0.0;
    for (int a = 0; a < 2; ++a) {
      rhs.segment(a * p, p) += c(a) * w_inv * d.y.row(i).transpose();
      for (int b = 0; b < 2; ++b) prec.block(a * p, b * p, p, p) += c(a) * c(b) * w_inv;
    }
  }
  const Vector mean = prec.ldlt().solve(rhs);
  expect_mean_within(pd.draws.leftCols(dim), mean, 4.0, "MANOVA conditional mean");
}

TEST(Gibbs, RejectsOtherModels) {
  Rng rng(1);
  const auto d = random_data(rng, 5, 2);
  EXPECT_THROW(gibbs_niw(Problem(hyper(ModelId::M3, 2), d), settings(100, 0)), Error);
  EXPECT_THROW(mwg_lkj(Problem(hyper(ModelId::M2, 2), d), settings(100, 0)), Error);
  EXPECT_THROW(exact_conjugate(Problem(hyper(ModelId::M5, 2, 1), d), settings(100, 0)), Error);
}

TEST(Settings, Validation) {
  Rng rng(1);
  const Problem problem(hyper(ModelId::M2, 2), random_data(rng, 5, 2));
  EXPECT_THROW(gibbs_niw(problem, settings(50, 10)), Error);
  EXPECT_THROW(gibbs_niw(problem, settings(200, -1)), Error);
}

TEST(Lkj, StrongEtaConcentratesCorrelation) {
  Rng rng(5);
  const int p = 2;
  auto h = hyper(ModelId::M3, p);
  h.eta = 1e6;
  const auto d = random_data(rng, 40, p);
  const auto pd = mwg_lkj(Problem(h, d), settings(3000, 1000));
  double mean_abs_r = 0.0;
  for (int t = 0; t < pd.size(); ++t) {
    const auto c = from_unconstrained(layout_for(ModelId::M3, d), pd.draws.row(t).transpose());
    mean_abs_r += std::abs((*c.params.r)(1, 0)) / pd.size();
  }
  EXPECT_LT(mean_abs_r, 0.05);
}

TEST(Lkj, AcceptanceAfterAdaptation) {
  const auto pop = synth::generate_population(synth::default_config());
  const auto bg = background_excluding(pop.data, {1});
  const auto y = standardize(pop.data.only_writer(1), bg);
  PriorHyper h = hyper(ModelId::M3, kFeatures);
  h.mu = Vector(y.feature_matrix().colwise().mean().transpose());
  h.B = Matrix::Identity(kFeatures, kFeatures);
  h.upsilon = -1.0;
  h.sigma = 1.0;
  h.eta = 1.0;
  const auto pd = mwg_lkj(Problem(h, make_model_data(y)), settings(1000, 1000));
  EXPECT_GE(pd.acceptance_rate, 0.1);
  EXPECT_LE(pd.acceptance_rate, 0.5);
}

TEST(Lkj, DegenerateScaleMatchesExactConditional) {
  Rng rng(6);
  const int p = 1;
  auto h = hyper(ModelId::M3, p);
  h.upsilon = std::log(0.8);
  h.sigma = 1e-6;
  h.B = Matrix::Constant(1, 1, 2.0);
  Matrix y(12, 1);
  for (int i = 0; i < 12; ++i) y(i, 0) = 0.5 + 0.8 * rng.normal();
  const auto d = make_model_data(y, std::vector<int>(12, 0));
  const auto pd = mwg_lkj(Problem(h, d), settings(20000, 1000));
  const double w = 0.64, b = 2.0;
  const double var = 1.0 / (1.0 / b + d.n / w);
  const double mean = var * ((*h.mu)(0) / b + d.n * d.ybar(0) / w);
  expect_mean_within(theta_draws(pd, p), Vector::Constant(1, mean), 4.0, "LKJ degenerate scale");
}

TEST(Lkj, ProposalFrozenAfterBurnIn) {
  Rng rng(7);
  const Problem problem(hyper(ModelId::M3, 3), random_data(rng, 20, 3));
  const auto a = mwg_lkj(problem, settings(100, 400, 9));
  const auto b = mwg_lkj(problem, settings(600, 400, 9));
  ASSERT_EQ(a.proposal_hash.size(), 1u);
  EXPECT_EQ(a.proposal_hash, b.proposal_hash);
  EXPECT_EQ(a.draws.topRows(100), b.draws.topRows(100));
}

TEST(Samplers, DeterministicGivenSeed) {
  Rng rng(8);
  const auto d = random_data(rng, 10, 2, 2);
  for (ModelId m : kAllModels) {
    const Problem problem(hyper(m, 2, 2), d);
    const auto a = sample_posterior(problem, settings(150, 50, 3, 2));
    const auto b = sample_posterior(problem, settings(150, 50, 3, 2));
    const auto c = sample_posterior(problem, settings(150, 50, 4, 2));
    EXPECT_EQ(a.draws, b.draws) << model_name(m);
    EXPECT_NE(a.draws, c.draws) << model_name(m);
    EXPECT_TRUE(a.draws.allFinite());
    EXPECT_EQ(a.size(), 300);
    EXPECT_EQ(a.dim(), problem.dim());
  }
}

TEST(Samplers, ParallelChainsMatchSerial) {
  Rng rng(8);
  const Problem problem(hyper(ModelId::M6, 2, 2), random_data(rng, 10, 2, 2));
  auto s = settings(120, 60, 5, 3);
  const auto serial = sample_posterior(problem, s);
  s.jobs = 3;
  EXPECT_EQ(sample_posterior(problem, s).draws, serial.draws);
}

TEST(Samplers, ExactConjugateMoments) {
  Rng rng(10);
  const int p = 2;
  const auto h = hyper(ModelId::M1, p);
  const auto d = random_data(rng, 7, p);
  const auto pd = exact_conjugate(Problem(h, d), settings(20000, 0));
  const double kn = *h.k0 + d.n;
  const Vector mean = (*h.k0 * *h.mu + d.n * d.ybar) / kn;
  expect_mean_within(theta_draws(pd, p), mean, 4.0, "conjugate posterior mean");
}

TEST(Samplers, CsvDump) {
  Rng rng(1);
  const Problem problem(hyper(ModelId::M2, 2), random_data(rng, 5, 2));
  const auto pd = gibbs_niw(problem, settings(100, 10));
  const auto csv = draws_to_csv(pd);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
}

TEST(Diagnostics, WhiteNoiseEss) {
  Rng rng(11);
  const int n = 5000;
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.normal();
  EXPECT_NEAR(effective_sample_size(x), n, 0.2 * n);
}

TEST(Diagnostics, Ar1Ess) {
  Rng rng(12);
  const int n = 50000;
  const double rho = 0.9;
  Vector x(n);
  x(0) = rng.normal();
  for (int i = 1; i < n; ++i) x(i) = rho * x(i - 1) + std::sqrt(1 - rho * rho) * rng.normal();
  const double expected = n * (1 - rho) / (1 + rho);
  EXPECT_NEAR(effective_sample_size(x), expected, 0.3 * expected);
}

TEST(Diagnostics, SplitRhat) {
  Rng rng(13);
  Vector a(1000);
  for (int i = 0; i < 1000; ++i) a(i) = rng.normal();
  EXPECT_NEAR(split_rhat({a, a}), 1.0, 0.01);
  Vector trend = a;
  for (int i = 0; i < 1000; ++i) trend(i) += 0.01 * i;
  EXPECT_GT(split_rhat({trend, trend}), 1.5);
  EXPECT_THROW(split_rhat({a}), Error);

  PosteriorDraws single;
  single.draws = Matrix::Zero(200, 2);
  single.chains = 1;
  try {
    diagnostics(single);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NeedMoreChains);
  }
}

TEST(Diagnostics, WellMixedGibbsChains) {
  Rng rng(14);
  const Problem problem(hyper(ModelId::M2, 2), random_data(rng, 20, 2));
  const auto pd = gibbs_niw(problem, settings(2000, 200, 1, 4));
  const auto diag = diagnostics(pd);
  EXPECT_LT(diag.rhat.maxCoeff(), 1.02);
  EXPECT_GT(diag.ess.minCoeff(), 1000.0);
}
