#pragma once

#include <cmath>
#include <vector>

#include "hwbf/sampler.hpp"

namespace hwbf {

/// Effective sample size of one sequence by Geyer's initial positive
/// sequence estimator, with the monotone adjustment.
inline double effective_sample_size(const Vector& x) {
  const auto n = x.size();
  if (n < 4) throw Error(ErrorKind::NeedMoreDraws, "ESS needs at least four draws");
  const Vector c = x.array() - x.mean();
  const double var = c.squaredNorm() / static_cast<double>(n);
  if (!(var > 0.0)) return static_cast<double>(n);
  const auto rho = [&](Eigen::Index lag) {
    return c.head(n - lag).dot(c.tail(n - lag)) / (static_cast<double>(n) * var);
  };
  double tau = -1.0;
  double prev_pair = INFINITY;
  for (Eigen::Index m = 0; 2 * m + 1 < n; ++m) {
    double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
}

/// Split-Rhat of one coordinate across chains (each chain split in halves).
inline double split_rhat(const std::vector<Vector>& chains) {
  if (chains.size() < 2) throw Error(ErrorKind::NeedMoreChains, "split-Rhat needs at least two chains");
  std::vector<Vector> halves;
  for (const auto& c : chains) {
    const auto h = c.size() / 2;
    if (h < 2) throw Error(ErrorKind::NeedMoreDraws, "chains too short for split-Rhat");
    halves.emplace_back(c.head(h));
    halves.emplace_back(c.segment(c.size() - h, h));
  }
  const auto n = static_cast<double>(halves.front().size());
  const auto m = static_cast<double>(halves.size());
  double grand = 0.0, within = 0.0;
  std::vector<double> means;
  for (const auto& h : halves) {
    const double mu = h.head(static_cast<Eigen::Index>(n)).mean();
    means.push_back(mu);
    grand += mu / m;
    within += (h.head(static_cast<Eigen::Index>(n)).array() - mu).square().sum() / (n - 1.0) / m;
  }
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= n / (m - 1.0);
  if (!(within > 0.0)) return between > 0.0 ? INFINITY : 1.0;
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

struct Diagnostics {
  Vector ess;
  Vector rhat;
};

/// Per-coordinate ESS (summed over chains) and split-Rhat.
inline Diagnostics diagnostics(const PosteriorDraws& pd) {
  if (pd.per_chain() < 100) throw Error(ErrorKind::NeedMoreDraws, "diagnostics need 100 draws per chain");
  if (pd.chains < 2) throw Error(ErrorKind::NeedMoreChains, "split-Rhat needs at least two chains");
  Diagnostics out;
  out.ess = Vector::Zero(pd.dim());
  out.rhat.resize(pd.dim());
  for (int j = 0; j < pd.dim(); ++j) {
    std::vector<Vector> cols;
    for (int c = 0; c < pd.chains; ++c) {
      cols.emplace_back(pd.chain(c).col(j));
      out.ess(j) += effective_sample_size(cols.back());
    }
    out.rhat(j) = split_rhat(cols);
  }
  return out;
}

/// Per-coordinate ESS only; valid for a single chain.
inline Vector ess_per_coordinate(const PosteriorDraws& pd) {
  Vector out = Vector::Zero(pd.dim());
  for (int j = 0; j < pd.dim(); ++j) {
    for (int c = 0; c < pd.chains; ++c) out(j) += effective_sample_size(pd.chain(c).col(j));
  }
  return out;
}

}  // namespace hwbf
