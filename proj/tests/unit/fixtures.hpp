#pragma once

#include <cmath>
#include <vector>

#include "hwbf/models.hpp"
#include "hwbf/random.hpp"

namespace fixtures {

using hwbf::Matrix;
using hwbf::ModelId;
using hwbf::PriorHyper;
using hwbf::Vector;

inline Matrix random_spd(hwbf::Rng& rng, int p, double ridge = 0.5) {
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() / p + ridge * Matrix::Identity(p, p);
}

inline Matrix random_corr(hwbf::Rng& rng, int p) {
  const Matrix s = random_spd(rng, p);
  const Vector d = s.diagonal().array().rsqrt();
  return d.asDiagonal() * s * d.asDiagonal();
}

/// Hand-built hyperparameters for a model of dimension p with L labels.
inline PriorHyper hyper(ModelId m, int p, int labels = 2, double nu_extra = 2.0, std::uint64_t seed = 1) {
  hwbf::Rng rng(seed);
  PriorHyper h;
  h.model = m;
  if (!hwbf::is_manova(m)) {
    h.mu = 0.3 * rng.normal_vector(p);
    if (m != ModelId::M1) h.B = random_spd(rng, p);
  } else {
    h.mu_ell.emplace();
    for (int l = 0; l < labels; ++l) h.mu_ell->push_back(0.3 * rng.normal_vector(p));
    if (m != ModelId::M4) {
      h.B_ell.emplace();
      for (int l = 0; l < labels; ++l) h.B_ell->push_back(random_spd(rng, p));
    }
  }
  if (hwbf::uses_inverse_wishart(m)) {
    h.nu = p + nu_extra;
    h.U = random_spd(rng, p) * (*h.nu - p - 1);
  } else {
    h.upsilon = -0.2;
    h.sigma = 0.5;
    h.eta = 2.0;
  }
  if (m == ModelId::M1) h.k0 = 0.4;
  if (m == ModelId::M4) {
    h.K0 = Vector(labels);
    for (int l = 0; l < labels; ++l) h.K0->coeffRef(l) = 0.3 + 0.2 * l;
  }
  return h;
}

/// Rows with characters cycling through 0..labels-1.
inline hwbf::ModelData random_data(hwbf::Rng& rng, int n, int p, int labels = 1) {
  Matrix y(n, p);
  std::vector<int> c;
  for (int i = 0; i < n; ++i) {
    y.row(i) = rng.normal_vector(p).transpose();
    c.push_back(i % labels);
  }
  return hwbf::make_model_data(y, c);
}

}  // namespace fixtures
