#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>

#include "hwbf/bridge.hpp"
#include "hwbf/elicit.hpp"

namespace hwbf {

struct EvidenceSettings {
  SamplerSettings sampler;
  BridgeSettings bridge;
  int runs = 10;
  std::uint64_t seed = 1;
  int jobs = 1;  // parallel bridge runs within one marginal

  void validate() const {
    sampler.validate();
    bridge.validate();
    if (runs < 1) throw Error(ErrorKind::BadConfig, "runs must be at least 1");
  }
};

struct Marginal {
  double log_m = std::numeric_limits<double>::quiet_NaN();
  double mce = std::numeric_limits<double>::quiet_NaN();  // 0 for closed forms
  int failed_runs = 0;
  int not_converged = 0;
  bool exact = false;
};

/// Exact for M1/M4, otherwise the mean over `runs` sampler + bridge pipelines.
inline Marginal log_marginal(const Problem& problem, const EvidenceSettings& s, std::uint64_t seed) {
  Marginal m;
  if (is_conjugate(problem.model())) {
    m.log_m = closed_form_log_marginal(problem.data(), problem.hyper());
    m.mce = 0.0;
    m.exact = true;
    return m;
  }
  const auto rb = repeated_bridge(problem, s.runs, s.sampler, s.bridge, seed, s.jobs);
  m.log_m = rb.mean;
  m.mce = rb.mce;
  m.failed_runs = rb.failed;
  m.not_converged = rb.not_converged;
  return m;
}

inline Marginal log_marginal(const Dataset& data, const PriorHyper& hyper, const EvidenceSettings& s) {
  if (data.empty()) throw Error(ErrorKind::MissingCell, "marginal likelihood needs data");
  return log_marginal(Problem(hyper, make_model_data(data)), s, s.seed);
}

struct EvidenceResult {
  ModelId model = ModelId::M1;
  Marginal h1;
  Marginal y1_h2;
  Marginal y2_h2;
  double log_bf = std::numeric_limits<double>::quiet_NaN();
  double combined_mce = std::numeric_limits<double>::quiet_NaN();
  std::string fingerprint;

  /// log_bf == h1 - y1_h2 - y2_h2, exactly as stored.
  bool identity_holds() const { return log_bf == h1.log_m - y1_h2.log_m - y2_h2.log_m; }
};

inline std::string settings_fingerprint(ModelId model, const EvidenceSettings& s, const PriorHyper& hyper,
                                        std::size_t n1, std::size_t n2) {
  std::uint64_t h = detail::hash_bytes(&model, sizeof(model));
  const auto mix = [&](const auto& v) { h = detail::hash_bytes(&v, sizeof(v), h); };
  mix(s.sampler.iterations);
  mix(s.sampler.burn_in);
  mix(s.sampler.chains);
  mix(s.sampler.target_accept);
  mix(s.sampler.adapt_window);
  mix(s.sampler.independence_move);
  mix(s.bridge.tol);
  mix(s.bridge.max_iter);
  mix(s.bridge.warp);
  mix(s.runs);
  mix(s.seed);
  mix(n1);
  mix(n2);
  for (const auto* v : {&hyper.nu, &hyper.k0, &hyper.upsilon, &hyper.sigma, &hyper.eta}) {
    if (*v) mix(**v);
  }
  if (hyper.U) h = detail::hash_matrix(*hyper.U, h);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline double combine_mce(std::initializer_list<double> parts) {
  double ss = 0.0;
  for (double v : parts) ss += v * v;
  return std::sqrt(ss);
}

/// Bayes factor of H1 (same source) against H2 for standardized data with
/// priors already elicited from a background free of both sources.
inline EvidenceResult bayes_factor_with_prior(const Dataset& y1, const Dataset& y2, const PriorHyper& hyper,
                                              const EvidenceSettings& s) {
  s.validate();
  if (y1.empty() || y2.empty()) throw Error(ErrorKind::MissingCell, "questioned and control data must be nonempty");
  const auto role_seed = [&](std::uint64_t role) {
    return derive_seed(s.seed, {static_cast<std::uint64_t>(hyper.model), role});
  };
  EvidenceResult r;
  r.model = hyper.model;
  r.h1 = log_marginal(Problem(hyper, make_model_data(concat(y1, y2))), s, role_seed(0));
  r.y1_h2 = log_marginal(Problem(hyper, make_model_data(y1)), s, role_seed(1));
  r.y2_h2 = log_marginal(Problem(hyper, make_model_data(y2)), s, role_seed(2));
  r.log_bf = r.h1.log_m - r.y1_h2.log_m - r.y2_h2.log_m;
  r.combined_mce = combine_mce({r.h1.mce, r.y1_h2.mce, r.y2_h2.mce});
  r.fingerprint = settings_fingerprint(hyper.model, s, hyper, y1.size(), y2.size());
  return r;
}

inline void check_no_leakage(const Dataset& background, const Dataset& y1, const Dataset& y2) {
  for (const auto* d : {&y1, &y2}) {
    for (int w : d->writers()) {
      if (background.has_writer(w)) {
        throw Error(ErrorKind::LeakageError, "background contains case writer " + std::to_string(w));
      }
    }
  }
}

/// Full pipeline on raw (unstandardized) data: standardize by the background,
/// elicit priors from it, and evaluate the three marginals.
inline EvidenceResult bayes_factor(ModelId model, const Dataset& y1, const Dataset& y2, const Dataset& background,
                                   const EvidenceSettings& s, const ElicitOptions& elicit = {}) {
  check_no_leakage(background, y1, y2);
  const Dataset bg = standardize(background, background);
  const PriorHyper hyper = elicit_priors(model, bg, elicit);
  return bayes_factor_with_prior(standardize(y1, background), standardize(y2, background), hyper, s);
}

/// log m(D_i | M_l) - log m(D_i | M_xi) with priors from the remaining writers.
struct ModelComparison {
  ModelId numerator = ModelId::M1;
  ModelId denominator = ModelId::M1;
  Marginal m_num;
  Marginal m_den;
  double log_bf = 0.0;
  double combined_mce = 0.0;
};

inline ModelComparison model_comparison_bf(const Dataset& data_i, const Dataset& background, ModelId model_l,
                                           ModelId model_xi, const EvidenceSettings& s,
                                           const ElicitOptions& elicit = {}) {
  s.validate();
  check_no_leakage(background, data_i, Dataset{});
  const Dataset bg = standardize(background, background);
  const Dataset d = standardize(data_i, background);
  const auto marginal = [&](ModelId m) {
    return log_marginal(Problem(elicit_priors(m, bg, elicit), make_model_data(d)), s,
                        derive_seed(s.seed, {static_cast<std::uint64_t>(m), 3}));
  };
  ModelComparison c;
  c.numerator = model_l;
  c.denominator = model_xi;
  c.m_num = marginal(model_l);
  c.m_den = model_l == model_xi ? c.m_num : marginal(model_xi);
  c.log_bf = c.m_num.log_m - c.m_den.log_m;
  c.combined_mce = model_l == model_xi ? 0.0 : combine_mce({c.m_num.mce, c.m_den.mce});
  return c;
}

/// Verbal scale on |log BF| with thresholds ln 3, ln 10, ln 30, ln 100.
inline constexpr std::array<double, 4> kBandThresholds = {1.1, 2.3, 3.4, 4.6};

inline std::string evidence_band(double log_bf) {
  if (!std::isfinite(log_bf)) return "undetermined";
  static constexpr std::array<const char*, 5> names = {"bare mention", "substantial", "strong", "very strong",
                                                       "extreme"};
  const double a = std::abs(log_bf);
  std::size_t k = 0;
  while (k < kBandThresholds.size() && a >= kBandThresholds[k]) ++k;
  return std::string(names[k]) + (log_bf >= 0.0 ? " support for H1" : " support for H2");
}

}  // namespace hwbf
