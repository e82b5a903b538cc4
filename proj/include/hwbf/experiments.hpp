#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hwbf/evidence.hpp"
#include "hwbf/parallel.hpp"

namespace hwbf {

/// One model fitted either to all characters or, for Normal models, to a
/// single character.
struct Analysis {
  ModelId model = ModelId::M1;
  std::optional<int> character;

  std::string name() const {
    return model_name(model) + ":" + (character ? std::string(kLabels[*character]) : std::string("all"));
  }
};

struct StudyConfig {
  std::vector<ModelId> models{kAllModels.begin(), kAllModels.end()};
  bool per_character = true;  // adds single-character runs of the Normal models
  int repetitions = 100;
  double pi_lo = 0.35;
  double pi_hi = 0.65;
  std::uint64_t seed = 1;
  EvidenceSettings evidence;
  ElicitOptions elicit;
  std::vector<double> nu_values = {kFeatures + 2.0, 20, 30, 40, 50};
  std::vector<double> eta_values = {1, 2, 5, 10, 20};
  double subsample_fraction = 0.5;
  int subsample_iterations = 30;
  bool subsample_replace = true;
  int sweep_pairs = 4;
  int sweep_splits = 10;
  int jobs = 1;
  bool log_cases = false;

  StudyConfig() { evidence.runs = 1; }

  void validate() const {
    if (models.empty()) throw Error(ErrorKind::BadConfig, "no models selected");
    if (repetitions < 1) throw Error(ErrorKind::BadConfig, "repetitions must be at least 1");
    if (!(pi_lo > 0.0 && pi_lo <= pi_hi && pi_hi < 1.0)) {
      throw Error(ErrorKind::BadConfig, "pi range must satisfy 0 < lo <= hi < 1");
    }
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
      throw Error(ErrorKind::BadConfig, "subsample fraction must lie in (0, 1]");
    }
    if (subsample_iterations < 1 || sweep_pairs < 1 || sweep_splits < 1) {
      throw Error(ErrorKind::BadConfig, "sweep and subsample counts must be positive");
    }
    evidence.validate();
  }

  std::vector<Analysis> analyses(const std::vector<int>& characters) const {
    std::vector<Analysis> out;
    for (ModelId m : models) {
      if (!is_manova(m) && per_character) {
        for (int c : characters) out.push_back({m, c});
      }
      out.push_back({m, std::nullopt});
    }
    return out;
  }
};

struct CaseResult {
  int case_index = 0;
  bool same_writer = true;
  int questioned_writer = 0;
  int control_writer = 0;
  int repetition = 0;
  double pi_split = 0.0;
  Analysis analysis;
  std::optional<EvidenceResult> result;
  std::string error;
};

struct RateSummary {
  std::string analysis;
  int cases = 0;
  int failed = 0;
  int errors = 0;  // FN for same-writer, FP for different-writer
  double rate = std::numeric_limits<double>::quiet_NaN();
};

struct StudyReport {
  std::string kind;  // "same-writer" or "different-writer"
  std::vector<CaseResult> cases;
  std::vector<RateSummary> rates;

  const RateSummary* rate_for(const std::string& analysis) const {
    for (const auto& r : rates) {
      if (r.analysis == analysis) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline Dataset restrict_to(const Dataset& d, const Analysis& a) {
  return a.character ? d.only_character(*a.character) : d;
}

/// Priors for one analysis, cached per background key. Thread-safe.
class PriorCache {
 public:
  PriorHyper get(const std::string& key, const Analysis& a, const Dataset& bg_std, const ElicitOptions& opt) {
    const std::string full = key + "|" + a.name();
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(full); it != cache_.end()) return it->second;
    }
    PriorHyper h = elicit_priors(a.model, restrict_to(bg_std, a), opt);
    std::lock_guard lock(mutex_);
    return cache_.emplace(full, std::move(h)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, PriorHyper> cache_;
};

inline std::string writers_key(const std::set<int>& writers) {
  std::string k;
  for (int w : writers) k += std::to_string(w) + ",";
  return k;
}

inline void summarize_rates(StudyReport& report) {
  std::map<std::string, RateSummary> by;
  std::vector<std::string> order;
  for (const auto& c : report.cases) {
    const std::string name = c.analysis.name();
    if (!by.count(name)) order.push_back(name);
    auto& r = by[name];
    r.analysis = name;
    ++r.cases;
    if (!c.result) {
      ++r.failed;
      continue;
    }
    const double lbf = c.result->log_bf;
    if (c.same_writer ? lbf < 0.0 : lbf > 0.0) ++r.errors;
  }
  for (const auto& name : order) {
    auto r = by[name];
    const int valid = r.cases - r.failed;
    if (valid > 0) r.rate = static_cast<double>(r.errors) / valid;
    report.rates.push_back(r);
  }
}

struct CaseSpec {
  bool same_writer = true;
  int writer_q = 0;
  int writer_c = 0;
  int repetition = 0;
};

inline void log_line(const StudyConfig& cfg, const std::string& line) {
  if (!cfg.log_cases) return;
  static std::mutex m;
  std::lock_guard lock(m);
  std::fprintf(stderr, "%s\n", line.c_str());
}

inline StudyReport run_cases(const Dataset& data, const StudyConfig& cfg, const std::vector<CaseSpec>& specs,
                             const std::string& kind) {
  StudyReport report;
  report.kind = kind;
  const auto analyses = cfg.analyses(data.characters());
  report.cases.resize(specs.size() * analyses.size());
  PriorCache cache;
  parallel_for(specs.size(), cfg.jobs, [&](std::size_t i) {
    const auto& sp = specs[i];
    const std::uint64_t seed = derive_seed(cfg.seed, {i});
    Rng rng(seed);
    const double pi = rng.uniform(cfg.pi_lo, cfg.pi_hi);
    std::set<int> excluded = {sp.writer_q, sp.writer_c};
    const Dataset bg_raw = background_excluding(data, excluded);
    const std::string key = writers_key(excluded);
    for (std::size_t a = 0; a < analyses.size(); ++a) {
      CaseResult& cr = report.cases[i * analyses.size() + a];
      cr.case_index = static_cast<int>(i);
      cr.same_writer = sp.same_writer;
      cr.questioned_writer = sp.writer_q;
      cr.control_writer = sp.writer_c;
      cr.repetition = sp.repetition;
      cr.pi_split = pi;
      cr.analysis = analyses[a];
      try {
        const Dataset bg = standardize(bg_raw, bg_raw);
        Dataset y1, y2;
        if (sp.same_writer) {
          const auto split = split_writer(data, sp.writer_q, pi, derive_seed(seed, {1}));
          y1 = split.questioned;
          y2 = split.control;
        } else {
          y1 = split_writer(data, sp.writer_q, pi, derive_seed(seed, {1})).questioned;
          y2 = split_writer(data, sp.writer_c, pi, derive_seed(seed, {2})).control;
        }
        y1 = restrict_to(standardize(y1, bg_raw), analyses[a]);
        y2 = restrict_to(standardize(y2, bg_raw), analyses[a]);
        const PriorHyper h = cache.get(key, analyses[a], bg, cfg.elicit);
        EvidenceSettings es = cfg.evidence;
        es.seed = derive_seed(seed, {2 + a});
        es.jobs = 1;
        cr.result = bayes_factor_with_prior(y1, y2, h, es);
      } catch (const Error& e) {
        if (e.category() == ErrorCategory::Usage) throw;
        cr.error = std::string(to_string(e.kind())) + ": " + e.what();
      }
      std::ostringstream line;
      line << kind << " case " << i << " " << sp.writer_q << "/" << sp.writer_c << " " << cr.analysis.name() << " ";
      if (cr.result) {
        line << "logBF " << cr.result->log_bf;
      } else {
        line << "failed (" << cr.error << ")";
      }
      log_line(cfg, line.str());
    }
  });
  summarize_rates(report);
  return report;
}

}  // namespace detail

/// Same-writer comparisons: every writer x repetitions, each with a random
/// split; FN = log BF < 0.
inline StudyReport run_same_writer_study(const Dataset& data, const StudyConfig& cfg) {
  cfg.validate();
  const auto writers = data.writers();
  if (writers.size() < 3) throw Error(ErrorKind::NeedMoreWriters, "same-writer study needs three writers");
  std::vector<detail::CaseSpec> specs;
  for (int w : writers) {
    for (int r = 0; r < cfg.repetitions; ++r) specs.push_back({true, w, w, r});
  }
  return detail::run_cases(data, cfg, specs, "same-writer");
}

/// Different-writer comparisons: all unordered pairs x repetitions; FP = log BF > 0.
inline StudyReport run_different_writer_study(const Dataset& data, const StudyConfig& cfg) {
  cfg.validate();
  const auto writers = data.writers();
  if (writers.size() < 4) throw Error(ErrorKind::NeedMoreWriters, "different-writer study needs four writers");
  std::vector<detail::CaseSpec> specs;
  for (std::size_t i = 0; i < writers.size(); ++i) {
    for (std::size_t j = i + 1; j < writers.size(); ++j) {
      for (int r = 0; r < cfg.repetitions; ++r) specs.push_back({false, writers[i], writers[j], r});
    }
  }
  return detail::run_cases(data, cfg, specs, "different-writer");
}

// ---------------------------------------------------------------------------
// Mahalanobis distances

struct MahalanobisResult {
  std::vector<int> writers;
  Matrix distance;  // symmetrized square roots
  Matrix raw;       // M_ij before symmetrization (square roots)
  std::vector<int> ridged;
};

/// M_ij = mean over writer i's observations of the squared Mahalanobis
/// distance to writer j's mean under writer j's covariance; reported as
/// square roots and symmetrized by averaging.
inline MahalanobisResult mahalanobis_matrix(const Dataset& data) {
  MahalanobisResult res;
  res.writers = data.writers();
  const auto m = static_cast<Eigen::Index>(res.writers.size());
  if (m < 1) throw Error(ErrorKind::NeedMoreWriters, "no writers");
  std::vector<Matrix> obs;
  std::vector<Vector> means;
  std::vector<Matrix> chols;
  for (int w : res.writers) {
    const Matrix x = data.only_writer(w).feature_matrix();
    obs.push_back(x);
    means.emplace_back(x.colwise().mean());
    Matrix cov = x.rows() > 1 ? sample_covariance(x) : Matrix::Zero(x.cols(), x.cols());
    Eigen::LLT<Matrix> llt(cov);
    bool ok = llt.info() == Eigen::Success && x.rows() > x.cols();
    if (ok) {
      const Vector dg = Matrix(llt.matrixL()).diagonal();
      ok = dg.minCoeff() > 1e-10 * std::max(dg.maxCoeff(), 1e-300);
    }
    if (!ok) {
      const double scale = std::max(cov.trace() / static_cast<double>(cov.rows()), 1e-12);
      cov.diagonal().array() += 1e-6 * scale;
      res.ridged.push_back(w);
    }
    chols.push_back(cholesky_lower(cov, "writer covariance"));
  }
  res.raw.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Matrix centered = (obs[static_cast<std::size_t>(i)].rowwise() - means[static_cast<std::size_t>(j)].transpose()).transpose();
      const Matrix z = chols[static_cast<std::size_t>(j)].triangularView<Eigen::Lower>().solve(centered);
      res.raw(i, j) = std::sqrt(z.colwise().squaredNorm().mean());
    }
  }
  res.distance = 0.5 * (res.raw + res.raw.transpose());
  return res;
}

/// The k writer pairs with the smallest symmetrized distance.
inline std::vector<std::pair<int, int>> hardest_pairs(const MahalanobisResult& mr, int k) {
  std::vector<std::tuple<double, int, int>> all;
  const auto m = static_cast<int>(mr.writers.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) all.emplace_back(mr.distance(i, j), mr.writers[static_cast<std::size_t>(i)], mr.writers[static_cast<std::size_t>(j)]);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::pair<int, int>> out;
  for (int t = 0; t < k && t < static_cast<int>(all.size()); ++t) out.emplace_back(std::get<1>(all[static_cast<std::size_t>(t)]), std::get<2>(all[static_cast<std::size_t>(t)]));
  return out;
}

// ---------------------------------------------------------------------------
// Background subsampling

/// Per writer-character cell, draws round(fraction * n) repetitions (at least
/// one), with or without replacement; repetitions are renumbered.
inline Dataset subsample_background(const Dataset& bg, double fraction, bool replace, std::uint64_t seed) {
  std::map<std::pair<int, int>, std::vector<const Record*>> cells;
  for (const auto& r : bg.records()) cells[{r.writer, r.character}].push_back(&r);
  std::vector<Record> out;
  for (const auto& [key, recs] : cells) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(key.first), static_cast<std::uint64_t>(key.second)}));
    const auto n = recs.size();
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))));
    std::vector<std::size_t> pick;
    if (replace) {
      for (std::size_t t = 0; t < k; ++t) pick.push_back(rng.index(n));
    } else {
      std::vector<std::size_t> idx(n);
      for (std::size_t t = 0; t < n; ++t) idx[t] = t;
      for (std::size_t t = 0; t < k; ++t) std::swap(idx[t], idx[t + rng.index(n - t)]);
      pick.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(pick.begin(), pick.end());
    }
    int rep = 1;
    for (std::size_t t : pick) {
      Record r = *recs[t];
      r.repetition = rep++;
      out.push_back(r);
    }
  }
  return Dataset(std::move(out), bg.scaling());
}

struct SubsampleCase {
  int writer_q = 0;
  int writer_c = 0;
  double pi_split = 0.0;
  Analysis analysis;
  std::optional<double> reference_log_bf;  // full background
  std::vector<double> log_bfs;             // one per subsample (NaN if failed)
  int failed = 0;
  int shifts = 0;  // min(#positive, #negative) among subsample BFs
  double min_log_bf = std::numeric_limits<double>::quiet_NaN();
  double max_log_bf = std::numeric_limits<double>::quiet_NaN();
};

struct SubsampleReport {
  std::vector<SubsampleCase> cases;
  std::map<std::string, double> shift_rate;  // per analysis
};

/// Fixed single split per hard different-writer pair; the background is
/// standardized once and resampled `subsample_iterations` times.
inline SubsampleReport run_subsample_sensitivity(const Dataset& data, const StudyConfig& cfg) {
  cfg.validate();
  const auto pairs = hardest_pairs(mahalanobis_matrix(data), cfg.sweep_pairs);
  std::vector<Analysis> analyses;
  for (ModelId m : cfg.models) analyses.push_back({m, std::nullopt});
  SubsampleReport rep;
  rep.cases.resize(pairs.size() * analyses.size());
  parallel_for(pairs.size() * analyses.size(), cfg.jobs, [&](std::size_t idx) {
    const std::size_t pi_idx = idx / analyses.size();
    const auto& a = analyses[idx % analyses.size()];
    const auto [wq, wc] = pairs[pi_idx];
    const std::uint64_t seed = derive_seed(cfg.seed, {pi_idx, 17});
    Rng rng(seed);
    SubsampleCase& sc = rep.cases[idx];
    sc.writer_q = wq;
    sc.writer_c = wc;
    sc.pi_split = rng.uniform(cfg.pi_lo, cfg.pi_hi);
    sc.analysis = a;
    const Dataset bg_raw = background_excluding(data, {wq, wc});
    const Dataset bg = standardize(bg_raw, bg_raw);
    const Dataset y1 = standardize(split_writer(data, wq, sc.pi_split, derive_seed(seed, {1})).questioned, bg_raw);
    const Dataset y2 = standardize(split_writer(data, wc, sc.pi_split, derive_seed(seed, {2})).control, bg_raw);
    EvidenceSettings es = cfg.evidence;
    es.seed = derive_seed(seed, {3});
    es.jobs = 1;
    try {
      sc.reference_log_bf = bayes_factor_with_prior(y1, y2, elicit_priors(a.model, bg, cfg.elicit), es).log_bf;
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Usage) throw;
    }
    int pos = 0, neg = 0;
    for (int it = 0; it < cfg.subsample_iterations; ++it) {
      double v = std::numeric_limits<double>::quiet_NaN();
      try {
        const Dataset sub = subsample_background(bg, cfg.subsample_fraction, cfg.subsample_replace,
                                                 derive_seed(seed, {4, static_cast<std::uint64_t>(it)}));
        v = bayes_factor_with_prior(y1, y2, elicit_priors(a.model, sub, cfg.elicit), es).log_bf;
      } catch (const Error& e) {
        if (e.category() == ErrorCategory::Usage) throw;
      }
      sc.log_bfs.push_back(v);
      if (!std::isfinite(v)) {
        ++sc.failed;
        continue;
      }
      (v > 0.0 ? pos : neg) += 1;
      sc.min_log_bf = std::isnan(sc.min_log_bf) ? v : std::min(sc.min_log_bf, v);
      sc.max_log_bf = std::isnan(sc.max_log_bf) ? v : std::max(sc.max_log_bf, v);
    }
    sc.shifts = std::min(pos, neg);
  });
  std::map<std::string, std::pair<double, double>> tally;
  for (const auto& c : rep.cases) {
    auto& t = tally[c.analysis.name()];
    t.first += c.shifts;
    t.second += static_cast<double>(c.log_bfs.size()) - c.failed;
  }
  for (const auto& [name, t] : tally) rep.shift_rate[name] = t.second > 0 ? t.first / t.second : std::nan("");
  return rep;
}

// ---------------------------------------------------------------------------
// Prior sensitivity sweeps

struct SweepCurve {
  ModelId model = ModelId::M1;
  std::vector<double> values;
  std::vector<double> mean_log_bf;
  std::vector<int> failed;
  double slope = std::numeric_limits<double>::quiet_NaN();  // least squares of mean vs value

  bool strictly_increasing() const {
    for (std::size_t i = 1; i < mean_log_bf.size(); ++i) {
      if (!(mean_log_bf[i] > mean_log_bf[i - 1])) return false;
    }
    return !mean_log_bf.empty();
  }
};

struct SweepReport {
  std::string parameter;  // "nu" or "eta"
  std::vector<std::pair<int, int>> pairs;
  std::vector<SweepCurve> curves;
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

/// Hard pairs x random splits; every sweep value reuses the same splits and
/// sampler seeds.
inline SweepReport run_sweep(const Dataset& data, const StudyConfig& cfg, const std::string& parameter,
                             const std::vector<ModelId>& models, const std::vector<double>& values) {
  cfg.validate();
  SweepReport rep;
  rep.parameter = parameter;
  rep.pairs = hardest_pairs(mahalanobis_matrix(data), cfg.sweep_pairs);
  const std::size_t n_cases = rep.pairs.size() * static_cast<std::size_t>(cfg.sweep_splits);
  const std::size_t n_models = models.size();
  const std::size_t n_values = values.size();
  // results[case][model][value]
  std::vector<double> results(n_cases * n_models * n_values, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n_cases * n_models, cfg.jobs, [&](std::size_t job) {
    const std::size_t c = job / n_models, mi = job % n_models;
    const auto [wq, wc] = rep.pairs[c / static_cast<std::size_t>(cfg.sweep_splits)];
    const std::uint64_t seed = derive_seed(cfg.seed, {c, 29});
    Rng rng(seed);
    const double pi = rng.uniform(cfg.pi_lo, cfg.pi_hi);
    const Dataset bg_raw = background_excluding(data, {wq, wc});
    const Dataset bg = standardize(bg_raw, bg_raw);
    const Dataset y1 = standardize(split_writer(data, wq, pi, derive_seed(seed, {1})).questioned, bg_raw);
    const Dataset y2 = standardize(split_writer(data, wc, pi, derive_seed(seed, {2})).control, bg_raw);
    for (std::size_t v = 0; v < n_values; ++v) {
      ElicitOptions opt = cfg.elicit;
      if (parameter == "nu") opt.nu = values[v];
      else opt.eta = values[v];
      EvidenceSettings es = cfg.evidence;
      es.seed = derive_seed(seed, {3});
      es.jobs = 1;
      try {
        results[(c * n_models + mi) * n_values + v] =
            bayes_factor_with_prior(y1, y2, elicit_priors(models[mi], bg, opt), es).log_bf;
      } catch (const Error& e) {
        if (e.category() == ErrorCategory::Usage) throw;
      }
    }
  });
  for (std::size_t mi = 0; mi < n_models; ++mi) {
    SweepCurve curve;
    curve.model = models[mi];
    curve.values = values;
    for (std::size_t v = 0; v < n_values; ++v) {
      double sum = 0.0;
      int ok = 0, bad = 0;
      for (std::size_t c = 0; c < n_cases; ++c) {
        const double x = results[(c * n_models + mi) * n_values + v];
        if (std::isfinite(x)) {
          sum += x;
          ++ok;
        } else {
          ++bad;
        }
      }
      curve.mean_log_bf.push_back(ok ? sum / ok : std::nan(""));
      curve.failed.push_back(bad);
    }
    curve.slope = ls_slope(curve.values, curve.mean_log_bf);
    rep.curves.push_back(curve);
  }
  return rep;
}

inline std::vector<ModelId> select(const std::vector<ModelId>& wanted, bool lkj) {
  std::vector<ModelId> out;
  for (ModelId m : wanted) {
    if (is_lkj(m) == lkj) out.push_back(m);
  }
  return out;
}

}  // namespace detail

/// Mean different-writer log BF per nu for the inverse-Wishart models.
inline SweepReport run_nu_sweep(const Dataset& data, const StudyConfig& cfg) {
  return detail::run_sweep(data, cfg, "nu", detail::select(cfg.models, false), cfg.nu_values);
}

/// Mean different-writer log BF per eta for the LKJ models.
inline SweepReport run_eta_sweep(const Dataset& data, const StudyConfig& cfg) {
  return detail::run_sweep(data, cfg, "eta", detail::select(cfg.models, true), cfg.eta_values);
}

// ---------------------------------------------------------------------------
// Text and CSV output

inline std::string format_number(double v, int precision = 4) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string study_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "case,kind,questioned_writer,control_writer,repetition,pi_split,analysis,model,character,"
        "log_m_h1,log_m_y1_h2,log_m_y2_h2,log_bf,combined_mce,error\n";
  os << std::setprecision(17);
  for (const auto& c : r.cases) {
    os << c.case_index << ',' << (c.same_writer ? "same" : "different") << ',' << c.questioned_writer << ','
       << c.control_writer << ',' << c.repetition << ',' << c.pi_split << ',' << c.analysis.name() << ','
       << model_name(c.analysis.model) << ',' << (c.analysis.character ? kLabels[*c.analysis.character] : "all")
       << ',';
    if (c.result) {
      os << format_number(c.result->h1.log_m, 17) << ',' << format_number(c.result->y1_h2.log_m, 17) << ','
         << format_number(c.result->y2_h2.log_m, 17) << ',' << format_number(c.result->log_bf, 17) << ','
         << format_number(c.result->combined_mce, 17) << ",";
    } else {
      os << ",,,,,\"" << c.error << "\"";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string study_summary(const StudyReport& r) {
  std::ostringstream os;
  const char* label = r.kind == "same-writer" ? "FN" : "FP";
  os << r.kind << " study\n";
  os << std::left << std::setw(10) << "analysis" << std::right << std::setw(8) << "cases" << std::setw(8)
     << "failed" << std::setw(8) << label << std::setw(10) << "rate" << '\n';
  for (const auto& s : r.rates) {
    os << std::left << std::setw(10) << s.analysis << std::right << std::setw(8) << s.cases << std::setw(8)
       << s.failed << std::setw(8) << s.errors << std::setw(9) << format_number(100.0 * s.rate, 3) << "%\n";
  }
  return os.str();
}

inline std::string sweep_summary(const SweepReport& r) {
  std::ostringstream os;
  os << r.parameter << " sweep over " << r.pairs.size() << " pairs\n";
  os << std::left << std::setw(8) << "model";
  if (!r.curves.empty()) {
    for (double v : r.curves.front().values) os << std::right << std::setw(10) << format_number(v);
  }
  os << std::setw(10) << "slope" << '\n';
  for (const auto& c : r.curves) {
    os << std::left << std::setw(8) << model_name(c.model);
    for (double m : c.mean_log_bf) os << std::right << std::setw(10) << format_number(m);
    os << std::setw(10) << format_number(c.slope) << '\n';
  }
  return os.str();
}

}  // namespace hwbf
