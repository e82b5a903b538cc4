// One PASS/FAIL line per acceptance criterion. Arguments select criteria by
// number; no arguments runs all ten.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hwbf/hwbf.hpp"

using namespace hwbf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Matrix random_spd(Rng& rng, int p) {
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() / p + 0.5 * Matrix::Identity(p, p);
}

PriorHyper conjugate_hyper(Rng& rng, ModelId m, int p, int labels) {
  PriorHyper h;
  h.model = m;
  h.nu = p + 4.0;
  h.U = random_spd(rng, p) * (*h.nu - p - 1);
  if (m == ModelId::M1) {
    h.mu = 0.3 * rng.normal_vector(p);
    h.k0 = 0.5;
  } else {
    h.mu_ell.emplace();
    h.K0 = Vector(labels);
    for (int l = 0; l < labels; ++l) {
      h.mu_ell->push_back(0.3 * rng.normal_vector(p));
      (*h.K0)(l) = 0.4 + 0.3 * l;
    }
  }
  return h;
}

ModelData random_data(Rng& rng, int n, int p, int labels) {
  Matrix y(n, p);
  std::vector<int> c;
  for (int i = 0; i < n; ++i) {
    y.row(i) = rng.normal_vector(p).transpose();
    c.push_back(i % labels);
  }
  return make_model_data(y, c);
}

const synth::Population& default_population() {
  static const synth::Population pop = synth::generate_population(synth::default_config());
  return pop;
}

// 1. Bridge estimates of the conjugate marginals against their closed forms.
Outcome bridge_vs_closed_form() {
  Rng rng(101);
  SamplerSettings s;
  s.iterations = 8000;  // first half fits the proposal, second half gives T1 = T2 = 4000
  s.burn_in = 0;
  int worst = 0;
  double worst_ratio = 0.0;
  int total = 0, ok = 0;
  const auto check = [&](ModelId m, int p, int n, int labels) {
    const auto h = conjugate_hyper(rng, m, p, labels);
    const auto d = random_data(rng, n, p, labels);
    const Problem problem(h, d);
    const auto rb = repeated_bridge(problem, 10, s, {}, 7 + total);
    const double err = std::abs(rb.mean - closed_form_log_marginal(d, h));
    const double ratio = err / rb.mce;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = total;
    }
    ++total;
    ok += err <= 3 * rb.mce;
  };
  for (auto [p, n] : std::vector<std::pair<int, int>>{{2, 5}, {2, 20}, {3, 5}, {3, 20}, {3, 12}}) {
    check(ModelId::M1, p, n, 1);
  }
  for (auto [p, n] : std::vector<std::pair<int, int>>{{2, 6}, {2, 20}, {3, 12}}) check(ModelId::M4, p, n, 2);
  return {ok == total, fmt("%.0f/%.0f within 3 MCE, worst |error|/MCE = %.2f (instance %.0f)", ok, total,
                           worst_ratio, worst)};
}

// 2. Closed forms against a plain prior Monte Carlo average of the likelihood.
Outcome closed_form_vs_prior_mc() {
  Rng rng(202);
  const int draws = 200000;
  std::string detail;
  bool pass = true;
  for (ModelId m : {ModelId::M1, ModelId::M4}) {
    const int labels = m == ModelId::M1 ? 1 : 2;
    const auto h = conjugate_hyper(rng, m, 2, labels);
    const auto d = random_data(rng, 5, 2, labels);
    const Matrix u_chol = cholesky_lower(*h.U);
    std::vector<double> lik(draws);
    for (int t = 0; t < draws; ++t) {
      const Matrix w_chol = rng.inverse_wishart_chol(u_chol, *h.nu);
      Matrix theta(labels, 2);
      for (int a = 0; a < labels; ++a) {
        const double k = m == ModelId::M1 ? *h.k0 : (*h.K0)(a);
        const Vector mean = m == ModelId::M1 ? *h.mu : (*h.mu_ell)[static_cast<std::size_t>(a)];
        theta.row(a) = rng.mvn(mean, w_chol / std::sqrt(k)).transpose();
      }
      lik[static_cast<std::size_t>(t)] = log_likelihood_chol(m, theta, w_chol, d);
    }
    const double mx = *std::max_element(lik.begin(), lik.end());
    double s = 0, s2 = 0;
    for (double v : lik) {
      const double e = std::exp(v - mx);
      s += e;
      s2 += e * e;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    const double exact = std::exp(closed_form_log_marginal(d, h) - mx);
    const double z = std::abs(exact - mean) / se;
    pass = pass && z <= 3.0;
    detail += model_name(m) + fmt(" |exact - MC| = %.2f SE; ", z);
  }
  return {pass, detail};
}

// 3. Normalizing constant of exp(-x^2 / 2).
Outcome gaussian_constant() {
  Rng rng(303);
  Matrix fit(5000, 1), post(5000, 1);
  for (int i = 0; i < 5000; ++i) {
    fit(i, 0) = rng.normal();
    post(i, 0) = rng.normal();
  }
  const LogDensity log_q = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  const auto r = bridge_estimate(log_q, fit_proposal(fit), post, nullptr, 5000, {}, 304);
  const double err = std::abs(r.log_ml - 0.5 * std::log(2 * M_PI));
  return {err <= 0.01, fmt("estimate %.5f, error %.5f", r.log_ml, err)};
}

// 4. LKJ density integrates to one over the single correlation when p = 2.
Outcome lkj_normalization() {
  const int intervals = 20000;  // composite Simpson on (-1, 1)
  double worst = 0.0;
  for (double eta : {1.0, 2.0, 5.0, 10.0, 20.0}) {
    const auto f = [eta](double r) {
      if (std::abs(r) >= 1.0) return eta > 1.0 ? 0.0 : 0.5;  // endpoint limits
      Matrix m(2, 2);
      m << 1.0, r, r, 1.0;
      return std::exp(lkj_log_density(m, eta));
    };
    const double h = 2.0 / intervals;
    double acc = f(-1.0) + f(1.0);
    for (int k = 1; k < intervals; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(-1.0 + k * h);
    worst = std::max(worst, std::abs(acc * h / 3.0 - 1.0));
  }
  return {worst <= 1e-6, fmt("max |integral - 1| = %.2e", worst)};
}

// 5. Gibbs draws of theta against its exact Normal conditional.
Outcome gibbs_calibration() {
  Rng rng(505);
  const int p = 3;
  PriorHyper h;
  h.model = ModelId::M2;
  h.mu = 0.3 * rng.normal_vector(p);
  h.B = random_spd(rng, p);
  h.nu = p + 2.0;
  h.U = random_spd(rng, p);
  const auto d = random_data(rng, 8, p, 1);
  const Matrix w = random_spd(rng, p);
  SamplerSettings s;
  s.iterations = 20000;
  s.burn_in = 0;
  s.fixed_w = w;
  const auto pd = gibbs_niw(Problem(h, d), s);
  const Matrix b_inv = h.B->inverse(), w_inv = w.inverse();
  const Matrix cov = (b_inv + d.n * w_inv).inverse();
  const Vector mean = cov * (b_inv * *h.mu + w_inv * (d.n * d.ybar));
  const Matrix th = pd.draws.leftCols(p);
  const double t = static_cast<double>(th.rows());
  const Vector emp_mean = th.colwise().mean();
  const Matrix centred = th.rowwise() - emp_mean.transpose();
  const Matrix emp_cov = centred.transpose() * centred / (t - 1.0);
  double worst = 0.0;
  for (int i = 0; i < p; ++i) {
    const double se = std::sqrt(emp_cov(i, i) / effective_sample_size(Vector(th.col(i))));
    worst = std::max(worst, std::abs(emp_mean(i) - mean(i)) / se);
    for (int j = 0; j <= i; ++j) {
      // sampling SD of a Normal covariance estimate
      const double se_cov = std::sqrt((cov(i, j) * cov(i, j) + cov(i, i) * cov(j, j)) / t);
      worst = std::max(worst, std::abs(emp_cov(i, j) - cov(i, j)) / se_cov);
    }
  }
  return {worst <= 4.0, fmt("largest deviation %.2f SE", worst)};
}

// 6. Contour conversions and areas.
Outcome fourier_round_trips() {
  using namespace contour;
  Rng rng(606);
  double conv = 0.0, fit = 0.0, area = 0.0;
  for (int t = 0; t < 50; ++t) {
    Coefficients c{1.0 + 0.2 * rng.uniform(), {}};
    for (int h = 0; h < 4; ++h) c.pairs.emplace_back(0.05 * rng.normal(), 0.05 * rng.normal());
    const auto back = from_amplitude_phase(to_amplitude_phase(c));
    for (int h = 0; h < 4; ++h) {
      conv = std::max({conv, std::abs(back.pairs[h].first - c.pairs[h].first),
                       std::abs(back.pairs[h].second - c.pairs[h].second)});
    }
    const auto pc = render_contour(c, 128);
    const auto refit = fit_coefficients(pc, 4);
    fit = std::max(fit, std::abs(refit.a0 - c.a0));
    for (int h = 0; h < 4; ++h) {
      fit = std::max({fit, std::abs(refit.pairs[h].first - c.pairs[h].first),
                      std::abs(refit.pairs[h].second - c.pairs[h].second)});
    }
    area = std::max(area, std::abs(surface_area(normalize_contour(pc).contour) - 1.0));
  }
  const double a = 1.2, b = 0.8;
  PolarContour ellipse;
  for (int k = 0; k < 512; ++k) {
    const double phi = kTwoPi * k / 512;
    ellipse.phi.push_back(phi);
    ellipse.r.push_back(a * b / std::hypot(b * std::cos(phi), a * std::sin(phi)));
  }
  const double ell = std::abs(surface_area(ellipse) - M_PI * a * b);
  return {conv <= 1e-12 && fit <= 1e-8 && area <= 1e-10 && ell <= 1e-3,
          fmt("conversion %.1e, refit %.1e, unit area %.1e, ellipse %.1e", conv, fit, area, ell)};
}

// 7. Spread of repeated bridge estimates on a full-size M2 problem.
Outcome mce_magnitude() {
  const auto& data = default_population().data;
  const Dataset bg_raw = background_excluding(data, {1});
  const Dataset bg = standardize(bg_raw, bg_raw);
  const Dataset y = standardize(data.only_writer(1), bg_raw);
  const Problem problem(elicit_priors(ModelId::M2, bg), make_model_data(y));
  SamplerSettings s;
  s.iterations = 2000;
  s.burn_in = 1000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rb = repeated_bridge(problem, 10, s, {}, 707, default_jobs());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {rb.failed == 0 && rb.mce <= 0.3 && secs < 600,
          fmt("MCE %.3f over %.0f runs, %.0f s", rb.mce, rb.values.size(), secs)};
}

// 8. Error rates on the default population.
Outcome discrimination_direction() {
  const auto& data = default_population().data;
  StudyConfig cfg;
  cfg.per_character = false;
  cfg.repetitions = 20;
  cfg.jobs = default_jobs();
  const auto t0 = std::chrono::steady_clock::now();
  const auto same = run_same_writer_study(data, cfg);
  const auto diff = run_different_writer_study(data, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = true;
  std::string detail = "FN";
  for (ModelId m : kAllModels) {
    const auto* r = same.rate_for(model_name(m) + ":all");
    pass = pass && r && r->failed == 0 && r->rate <= 0.05;
    detail += " " + model_name(m) + fmt(" %.3f", r ? r->rate : NAN);
  }
  detail += "; FP";
  for (ModelId m : kAllModels) {
    const auto* r = diff.rate_for(model_name(m) + ":all");
    detail += " " + model_name(m) + fmt(" %.3f", r ? r->rate : NAN);
  }
  const std::vector<std::pair<ModelId, ModelId>> paired = {
      {ModelId::M4, ModelId::M1}, {ModelId::M5, ModelId::M2}, {ModelId::M6, ModelId::M3}};
  for (auto [manova, normal] : paired) {
    const auto* a = diff.rate_for(model_name(manova) + ":all");
    const auto* b = diff.rate_for(model_name(normal) + ":all");
    pass = pass && a && b && a->failed == 0 && b->failed == 0 && a->rate <= b->rate;
  }
  pass = pass && secs < 3600;
  return {pass, detail + fmt("; %.0f s with %.0f jobs", secs, cfg.jobs)};
}

// 9. Direction of the prior sensitivity curves.
Outcome sensitivity_directions() {
  const auto& data = default_population().data;
  StudyConfig cfg;
  cfg.jobs = default_jobs();
  bool pass = true;
  std::string detail;
  for (const auto& rep : {run_nu_sweep(data, cfg), run_eta_sweep(data, cfg)}) {
    for (const auto& c : rep.curves) {
      pass = pass && c.strictly_increasing();
      detail += model_name(c.model) + " [";
      for (std::size_t k = 0; k < c.mean_log_bf.size(); ++k) detail += (k ? " " : "") + fmt("%.1f", c.mean_log_bf[k]);
      detail += "] ";
    }
  }
  return {pass, detail};
}

// 10. Additive identity, antisymmetry and reproducibility.
Outcome structural_invariants() {
  auto pc = synth::default_config(11);
  pc.writers = 5;
  pc.reps_min = pc.reps_max = 10;
  const Dataset data = synth::generate_population(pc).data;
  StudyConfig cfg;
  cfg.repetitions = 2;
  cfg.evidence.runs = 2;
  cfg.evidence.sampler.iterations = 300;
  cfg.evidence.sampler.burn_in = 300;
  cfg.jobs = default_jobs();
  const auto a = run_same_writer_study(data, cfg);
  const auto b = run_same_writer_study(data, cfg);

  int identity_bad = 0, evaluated = 0;
  for (const auto& c : a.cases) {
    if (!c.result) continue;
    ++evaluated;
    const auto& r = *c.result;
    identity_bad += r.log_bf != r.h1.log_m - r.y1_h2.log_m - r.y2_h2.log_m;
  }
  const bool study_same = study_csv(a) == study_csv(b);
  const bool synth_same = to_csv(synth::generate_population(pc).data) == to_csv(data);

  EvidenceSettings es = cfg.evidence;
  const Dataset d = data.only_writer(1);
  const Dataset bg = background_excluding(data, {1});
  double worst = 0.0;
  for (auto [x, y] : std::vector<std::pair<ModelId, ModelId>>{{ModelId::M2, ModelId::M3},
                                                              {ModelId::M1, ModelId::M5},
                                                              {ModelId::M4, ModelId::M6}}) {
    const auto xy = model_comparison_bf(d, bg, x, y, es);
    const auto yx = model_comparison_bf(d, bg, y, x, es);
    const double tol = 2 * std::max(xy.combined_mce, yx.combined_mce);
    worst = std::max(worst, std::abs(xy.log_bf + yx.log_bf) - tol);
  }

  const auto sweep_cfg = [&] {
    StudyConfig s = cfg;
    s.sweep_pairs = 2;
    s.sweep_splits = 2;
    s.subsample_iterations = 2;
    return s;
  }();
  const auto sweep_a = run_eta_sweep(data, sweep_cfg), sweep_b = run_eta_sweep(data, sweep_cfg);
  bool sweep_same = true;
  for (std::size_t k = 0; k < sweep_a.curves.size(); ++k) {
    sweep_same = sweep_same && sweep_a.curves[k].mean_log_bf == sweep_b.curves[k].mean_log_bf;
  }
  const auto sub_a = run_subsample_sensitivity(data, sweep_cfg), sub_b = run_subsample_sensitivity(data, sweep_cfg);
  for (std::size_t k = 0; k < sub_a.cases.size(); ++k) {
    sweep_same = sweep_same && sub_a.cases[k].log_bfs == sub_b.cases[k].log_bfs;
  }

  const bool pass = evaluated > 0 && identity_bad == 0 && worst <= 0.0 && study_same && synth_same && sweep_same;
  return {pass, fmt("identity violations %.0f of %.0f; antisymmetry excess %.2e; ", identity_bad, evaluated, worst) +
                    "reruns identical: study " + (study_same ? "yes" : "no") + ", synth " +
                    (synth_same ? "yes" : "no") + ", sweeps " + (sweep_same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"bridge vs closed form", bridge_vs_closed_form},
      {"closed form vs prior Monte Carlo", closed_form_vs_prior_mc},
      {"Gaussian normalizing constant", gaussian_constant},
      {"LKJ normalization", lkj_normalization},
      {"Gibbs calibration", gibbs_calibration},
      {"Fourier round trips", fourier_round_trips},
      {"MCE magnitude", mce_magnitude},
      {"discrimination direction", discrimination_direction},
      {"sensitivity directions", sensitivity_directions},
      {"structural invariants", structural_invariants},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-34s %s  %s (%.1f s)\n", id, criteria[k].first, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
