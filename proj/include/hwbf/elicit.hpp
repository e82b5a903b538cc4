#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "hwbf/dataset.hpp"
#include "hwbf/models.hpp"

namespace hwbf {

/// Background moments: per writer-character means, per-character weighted
/// means and covariances, and the pooled within-writer covariance.
struct BackgroundSummary {
  int m = 0;  // writers
  int n = 0;  // observations
  std::vector<int> writers;
  std::vector<int> characters;                     // label indices present
  std::map<std::pair<int, int>, Vector> theta_hat;  // (writer, character)
  std::map<std::pair<int, int>, int> cell_count;
  std::map<int, Vector> mu_hat_ell;
  std::map<int, int> n_ell;
  std::map<int, Matrix> B_hat_ell;
  Vector mu_hat;
  Matrix W_hat;
  bool rank_warning = false;  // n - m < p
};

/// When `pool_characters` is set every record is treated as one character
/// (label 0), which is the summary the Normal models use.
inline BackgroundSummary summarize_background(const Dataset& bg, bool pool_characters = false) {
  BackgroundSummary s;
  s.writers = bg.writers();
  s.m = static_cast<int>(s.writers.size());
  s.n = static_cast<int>(bg.size());
  if (s.m < 2) throw Error(ErrorKind::NeedMoreWriters, "background needs at least two writers");

  const auto label = [&](const Record& r) { return pool_characters ? 0 : r.character; };
  std::map<std::pair<int, int>, Vector> sums;
  std::set<int> chars;
  for (const auto& r : bg.records()) {
    const auto key = std::make_pair(r.writer, label(r));
    auto [it, fresh] = sums.try_emplace(key, Vector::Zero(kFeatures));
    it->second += r.features;
    ++s.cell_count[key];
    chars.insert(label(r));
  }
  s.characters.assign(chars.begin(), chars.end());
  for (int w : s.writers) {
    for (int c : s.characters) {
      if (!s.cell_count.count({w, c})) {
        throw Error(ErrorKind::MissingCell, "writer " + std::to_string(w) + " has no '" +
                                                std::string(kLabels[c]) + "' repetitions");
      }
    }
  }
  for (const auto& [key, sum] : sums) s.theta_hat[key] = sum / s.cell_count[key];

  s.mu_hat = Vector::Zero(kFeatures);
  for (int c : s.characters) {
    int n_c = 0;
    for (int w : s.writers) n_c += s.cell_count[{w, c}];
    Vector mu_c = Vector::Zero(kFeatures);
    for (int w : s.writers) {
      mu_c += s.theta_hat[{w, c}] * (static_cast<double>(s.cell_count[{w, c}]) / n_c);
    }
    s.n_ell[c] = n_c;
    s.mu_hat_ell[c] = mu_c;
    s.mu_hat += mu_c * static_cast<double>(n_c) / s.n;
    s.B_hat_ell[c] = Matrix::Zero(kFeatures, kFeatures);
  }

  s.W_hat = Matrix::Zero(kFeatures, kFeatures);
  for (const auto& r : bg.records()) {
    const int c = label(r);
    const Vector around_mean = r.features - s.mu_hat_ell[c];
    s.B_hat_ell[c] += around_mean * around_mean.transpose();
    const Vector around_cell = r.features - s.theta_hat[{r.writer, c}];
    s.W_hat += around_cell * around_cell.transpose();
  }
  for (int c : s.characters) {
    if (s.n_ell[c] < 2) throw Error(ErrorKind::MissingCell, "need two observations per character");
    s.B_hat_ell[c] /= (s.n_ell[c] - 1.0);
  }
  if (s.n - s.m < 1) throw Error(ErrorKind::MissingCell, "no within-writer replication");
  s.W_hat /= static_cast<double>(s.n - s.m);
  s.rank_warning = s.n - s.m < kFeatures;
  return s;
}

/// Inverse-Wishart scale whose prior mean equals W_hat.
inline Matrix iw_scale_from_within(const Matrix& w_hat, double nu) {
  const auto p = w_hat.rows();
  if (!(nu >= p + 2)) throw Error(ErrorKind::BadDof, "nu must be at least p + 2");
  return w_hat * (nu - static_cast<double>(p) - 1.0);
}

enum class SigmaRule {
  AsPrinted,  // sum of signed deviations of log variances over p - 1
  SampleSd,   // sample standard deviation of log variances
};

struct LogNormalHyper {
  double upsilon = 0.0;
  double sigma = 0.0;
  double raw_sigma = 0.0;
  bool clamped = false;
};

inline constexpr double kSigmaFloor = 0.25;

/// LogNormal location/scale from the log diagonal of W_hat, with the scale
/// floored at `sigma_min`.
inline LogNormalHyper lognormal_from_within(const Matrix& w_hat, SigmaRule rule = SigmaRule::AsPrinted,
                                            double sigma_min = kSigmaFloor) {
  const auto p = w_hat.rows();
  Vector logs(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(w_hat(k, k) > 0.0)) throw Error(ErrorKind::BadVariance, "non-positive within variance");
    logs(k) = std::log(w_hat(k, k));
  }
  LogNormalHyper out;
  out.upsilon = logs.mean();
  const double denom = p > 1 ? static_cast<double>(p - 1) : 1.0;
  if (rule == SigmaRule::AsPrinted) {
    out.raw_sigma = (logs.array() - out.upsilon).sum() / denom;
  } else {
    out.raw_sigma = std::sqrt((logs.array() - out.upsilon).square().sum() / denom);
  }
  out.clamped = !(out.raw_sigma >= sigma_min);
  out.sigma = out.clamped ? sigma_min : out.raw_sigma;
  return out;
}

/// Ridge added before factorizing a possibly singular B_hat.
inline Matrix ridge(const Matrix& b) {
  const double lambda = 1e-8 * std::max(b.trace(), 1e-300) / static_cast<double>(b.rows());
  return b + lambda * Matrix::Identity(b.rows(), b.cols());
}

inline std::vector<double> default_k0_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

inline std::vector<double> default_K0_axis_grid() { return {0.1, 0.3, 0.5, 0.7, 0.9}; }

struct ElicitOptions {
  std::optional<double> nu;  // default p + 2
  double eta = 1.0;
  SigmaRule sigma_rule = SigmaRule::AsPrinted;
  double sigma_min = kSigmaFloor;
  std::vector<double> k0_grid = default_k0_grid();
  std::vector<double> K0_axis_grid = default_K0_axis_grid();

  double nu_value() const { return nu.value_or(kFeatures + 2.0); }
};

struct GridSearchResult {
  Vector best;                    // k0 (length 1) or diag(K0)
  double best_objective = -INFINITY;
  std::vector<double> objectives;  // in grid (row-major product) order
};

namespace detail {

/// Normal-model pieces (mu, U) elicited from a background, characters pooled.
struct PooledNormal {
  Vector mu;
  Matrix U;
};

inline PooledNormal pooled_normal(const Dataset& bg, double nu) {
  const auto s = summarize_background(bg, true);
  return {s.mu_hat, iw_scale_from_within(s.W_hat, nu)};
}

/// MANOVA prior means by difference coding from character 'a', and pooled U.
struct ManovaMeans {
  std::vector<Vector> mu_ell;
  std::vector<Matrix> B_ell;
  Matrix U;
};

inline ManovaMeans manova_means(const Dataset& bg, double nu) {
  const auto s = summarize_background(bg, false);
  if (!s.mu_hat_ell.count(0)) {
    throw Error(ErrorKind::MissingCell, "background has no reference character 'a'");
  }
  ManovaMeans out;
  out.mu_ell.assign(kNumLabels, Vector());
  out.B_ell.assign(kNumLabels, Matrix());
  const Vector& ref = s.mu_hat_ell.at(0);
  for (int c : s.characters) {
    if (c == 0) {
      out.mu_ell[0] = ref;
      out.B_ell[0] = s.B_hat_ell.at(0);
      continue;
    }
    // d_{ilj} = X_{ilj} - mu_a; mean and covariance of the differences.
    Vector mean = Vector::Zero(kFeatures);
    int count = 0;
    for (const auto& r : bg.records()) {
      if (r.character != c) continue;
      mean += r.features - ref;
      ++count;
    }
    mean /= count;
    Matrix cov = Matrix::Zero(kFeatures, kFeatures);
    for (const auto& r : bg.records()) {
      if (r.character != c) continue;
      const Vector d = r.features - ref - mean;
      cov += d * d.transpose();
    }
    out.mu_ell[static_cast<std::size_t>(c)] = mean;
    out.B_ell[static_cast<std::size_t>(c)] = cov / (count - 1.0);
  }
  out.U = iw_scale_from_within(s.W_hat, nu);
  return out;
}

inline ModelData writer_data(const Dataset& bg, int writer, bool pooled) {
  Dataset d = bg.only_writer(writer);
  ModelData md = make_model_data(d);
  if (pooled) md = make_model_data(md.y, std::vector<int>(static_cast<std::size_t>(md.n), 0));
  return md;
}

}  // namespace detail

/// Leave-one-out grid search for k0: each background writer's data is scored
/// by the M1 closed form with mu and U elicited from the other writers.
inline GridSearchResult grid_search_k0(const Dataset& bg, const std::vector<double>& grid, double nu) {
  if (grid.empty()) throw Error(ErrorKind::BadGrid, "empty k0 grid");
  for (double g : grid) {
    if (!(g > 0.0 && g < 1.0)) throw Error(ErrorKind::BadGrid, "k0 grid values must lie in (0, 1)");
  }
  const auto writers = bg.writers();
  if (writers.size() < 3) throw Error(ErrorKind::NeedMoreWriters, "leave-one-out needs three writers");
  std::vector<std::pair<ModelData, PriorHyper>> folds;
  for (int w : writers) {
    const auto others = detail::pooled_normal(background_excluding(bg, {w}), nu);
    PriorHyper h;
    h.model = ModelId::M1;
    h.mu = others.mu;
    h.U = others.U;
    h.nu = nu;
    folds.emplace_back(detail::writer_data(bg, w, true), h);
  }
  GridSearchResult out;
  for (double g : grid) {
    double total = 0.0;
    for (auto& [data, hyper] : folds) {
      hyper.k0 = g;
      total += closed_form_log_marginal_m1(data, hyper);
    }
    out.objectives.push_back(total);
    if (total > out.best_objective) {
      out.best_objective = total;
      out.best = Vector::Constant(1, g);
    }
  }
  return out;
}

/// Leave-one-out search for a diagonal K0 over the product of per-axis grids;
/// one axis per character present in the background.
inline GridSearchResult grid_search_K0(const Dataset& bg, const std::vector<double>& axis_grid, double nu) {
  if (axis_grid.empty()) throw Error(ErrorKind::BadGrid, "empty K0 grid");
  for (double g : axis_grid) {
    if (!(g > 0.0 && g < 1.0)) throw Error(ErrorKind::BadGrid, "K0 grid values must lie in (0, 1)");
  }
  const auto writers = bg.writers();
  if (writers.size() < 3) throw Error(ErrorKind::NeedMoreWriters, "leave-one-out needs three writers");
  const auto chars = bg.characters();
  const int axes = static_cast<int>(chars.size());

  std::vector<std::pair<ModelData, PriorHyper>> folds;
  for (int w : writers) {
    const auto others = detail::manova_means(background_excluding(bg, {w}), nu);
    PriorHyper h;
    h.model = ModelId::M4;
    h.mu_ell = others.mu_ell;
    for (auto& v : *h.mu_ell) {
      if (v.size() == 0) v = Vector::Zero(kFeatures);
    }
    h.U = others.U;
    h.nu = nu;
    h.K0 = Vector::Constant(kNumLabels, 0.5);
    folds.emplace_back(detail::writer_data(bg, w, false), h);
  }

  const std::size_t g = axis_grid.size();
  std::size_t total_points = 1;
  for (int a = 0; a < axes; ++a) total_points *= g;
  GridSearchResult out;
  out.objectives.reserve(total_points);
  for (std::size_t flat = 0; flat < total_points; ++flat) {
    Vector k0 = Vector::Constant(kNumLabels, 0.5);
    std::size_t rest = flat;
    for (int a = axes - 1; a >= 0; --a) {
      k0(chars[static_cast<std::size_t>(a)]) = axis_grid[rest % g];
      rest /= g;
    }
    double total = 0.0;
    for (auto& [data, hyper] : folds) {
      hyper.K0 = k0;
      total += closed_form_log_marginal_m4(data, hyper);
    }
    out.objectives.push_back(total);
    if (total > out.best_objective) {
      out.best_objective = total;
      out.best = k0;
    }
  }
  return out;
}

/// Hyperparameters for `model` from a (standardized) background.
inline PriorHyper elicit_priors(ModelId model, const Dataset& bg, const ElicitOptions& opt = {}) {
  const double nu = opt.nu_value();
  PriorHyper h;
  h.model = model;
  if (!is_manova(model)) {
    const auto s = summarize_background(bg, true);
    h.mu = s.mu_hat;
    if (model != ModelId::M1) h.B = ridge(s.B_hat_ell.at(0));
    if (uses_inverse_wishart(model)) {
      h.U = iw_scale_from_within(s.W_hat, nu);
      h.nu = nu;
    } else {
      const auto ln = lognormal_from_within(s.W_hat, opt.sigma_rule, opt.sigma_min);
      h.upsilon = ln.upsilon;
      h.sigma = ln.sigma;
      h.sigma_clamped = ln.clamped;
      h.eta = opt.eta;
    }
    if (model == ModelId::M1) h.k0 = grid_search_k0(bg, opt.k0_grid, nu).best(0);
  } else {
    const auto mm = detail::manova_means(bg, nu);
    h.mu_ell = mm.mu_ell;
    if (model != ModelId::M4) {
      std::vector<Matrix> b;
      for (const auto& m : mm.B_ell) b.push_back(m.size() ? ridge(m) : Matrix());
      h.B_ell = b;
    }
    if (uses_inverse_wishart(model)) {
      h.U = mm.U;
      h.nu = nu;
    } else {
      const auto s = summarize_background(bg, false);
      const auto ln = lognormal_from_within(s.W_hat, opt.sigma_rule, opt.sigma_min);
      h.upsilon = ln.upsilon;
      h.sigma = ln.sigma;
      h.sigma_clamped = ln.clamped;
      h.eta = opt.eta;
    }
    if (model == ModelId::M4) h.K0 = grid_search_K0(bg, opt.K0_axis_grid, nu).best;
  }
  // Characters absent from the background get a placeholder row: zero mean,
  // identity covariance, unit K0.
  if (h.mu_ell) {
    for (std::size_t c = 0; c < h.mu_ell->size(); ++c) {
      if ((*h.mu_ell)[c].size() == 0) {
        (*h.mu_ell)[c] = Vector::Zero(kFeatures);
        if (h.B_ell) (*h.B_ell)[c] = Matrix::Identity(kFeatures, kFeatures);
        if (h.K0) (*h.K0)(static_cast<Eigen::Index>(c)) = 1.0;
      }
    }
  }
  return h;
}

}  // namespace hwbf
