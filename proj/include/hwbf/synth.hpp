#pragma once

#include <cstdint>
#include <vector>

#include "hwbf/dataset.hpp"
#include "hwbf/linalg.hpp"
#include "hwbf/random.hpp"

namespace hwbf::synth {

/// Hierarchical population: theta_{il} ~ N(mu + offset_l, B_l) once per
/// writer-character, then each repetition ~ N(theta_{il}, W_i).
struct PopulationConfig {
  int writers = 13;
  int characters = 4;  // first `characters` entries of kLabels
  int reps_min = 30;
  int reps_max = 30;
  Vector mu;
  std::vector<Matrix> between;  // B_l, one per character
  Matrix within;                // W template
  std::vector<Vector> character_offsets;
  /// Per-writer W_i ~ Wishart(within / dof, dof) when > 0; W_i = within otherwise.
  double within_jitter_dof = 0.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (writers < 2) throw Error(ErrorKind::BadConfig, "need at least two writers");
    if (characters < 1 || characters > kNumLabels) {
      throw Error(ErrorKind::BadConfig, "character count out of range");
    }
    if (reps_min < 2 || reps_max < reps_min) throw Error(ErrorKind::BadConfig, "bad repetition range");
    if (mu.size() != kFeatures || within.rows() != kFeatures || within.cols() != kFeatures) {
      throw Error(ErrorKind::BadConfig, "mean/covariance dimension must be 9");
    }
    if (static_cast<int>(between.size()) != characters ||
        static_cast<int>(character_offsets.size()) != characters) {
      throw Error(ErrorKind::BadConfig, "need one between-covariance and offset per character");
    }
    if (within_jitter_dof != 0.0 && within_jitter_dof < kFeatures) {
      throw Error(ErrorKind::BadConfig, "jitter dof must be 0 or at least p");
    }
  }
};

struct WriterTruth {
  int writer = 0;
  Matrix theta;  // characters x p
  Matrix within;
};

struct Population {
  Dataset data;
  std::vector<WriterTruth> truth;
};

/// Fixed within-writer template: decreasing scales with banded correlation.
inline Matrix default_within() {
  Vector sd(kFeatures);
  sd << 0.10, 0.020, 0.020, 0.030, 0.030, 0.015, 0.015, 0.010, 0.010;
  const double sign[kFeatures] = {1, -1, 1, 1, -1, 1, -1, 1, 1};
  Matrix corr(kFeatures, kFeatures);
  for (int i = 0; i < kFeatures; ++i) {
    for (int j = 0; j < kFeatures; ++j) corr(i, j) = sign[i] * sign[j] * std::pow(0.45, std::abs(i - j));
  }
  return sd.asDiagonal() * corr * sd.asDiagonal();
}

/// 13 writers with 30 repetitions of each of 4 loop characters. Between-writer
/// spread is a fraction of the within template; per-writer within covariances
/// are Wishart draws with 10 dof around it.
inline PopulationConfig default_config(std::uint64_t seed = 1) {
  PopulationConfig cfg;
  cfg.seed = seed;
  cfg.mu.resize(kFeatures);
  cfg.mu << 1.0, 0.02, -0.01, 0.12, 0.03, 0.01, -0.02, 0.015, 0.005;
  cfg.within = default_within();
  cfg.within_jitter_dof = 10.0;
  const std::vector<std::vector<double>> offsets = {
      {0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0.15, 0.02, 0.01, -0.03, 0.02, 0.01, 0.0, -0.005, 0.004},
      {-0.10, -0.01, 0.02, -0.06, -0.01, 0.0, 0.01, 0.004, -0.003},
      {0.05, 0.03, -0.02, -0.02, 0.03, -0.01, 0.005, 0.0, 0.006},
  };
  const std::vector<double> spread = {0.55, 0.45, 0.60, 0.40};
  for (int l = 0; l < cfg.characters; ++l) {
    cfg.character_offsets.push_back(Eigen::Map<const Vector>(offsets[l].data(), kFeatures));
    cfg.between.push_back(spread[static_cast<std::size_t>(l)] * cfg.within);
  }
  return cfg;
}

inline Population generate_population(const PopulationConfig& cfg) {
  cfg.validate();
  std::vector<Matrix> between_chol;
  for (const auto& b : cfg.between) between_chol.push_back(cholesky_lower(b, "between covariance"));
  const Matrix within_chol = cholesky_lower(cfg.within, "within covariance");

  Rng rng(cfg.seed);
  Population pop;
  std::vector<Record> records;
  for (int i = 0; i < cfg.writers; ++i) {
    WriterTruth truth{i + 1, Matrix(cfg.characters, kFeatures), cfg.within};
    if (cfg.within_jitter_dof > 0.0) {
      truth.within = rng.wishart(within_chol / std::sqrt(cfg.within_jitter_dof), cfg.within_jitter_dof);
    }
    const Matrix w_chol = cholesky_lower(truth.within, "writer covariance");
    for (int l = 0; l < cfg.characters; ++l) {
      const Vector centre = cfg.mu + cfg.character_offsets[static_cast<std::size_t>(l)];
      truth.theta.row(l) = rng.mvn(centre, between_chol[static_cast<std::size_t>(l)]).transpose();
    }
    for (int l = 0; l < cfg.characters; ++l) {
      const int reps = cfg.reps_min == cfg.reps_max
                           ? cfg.reps_min
                           : cfg.reps_min + static_cast<int>(rng.index(
                                                static_cast<std::size_t>(cfg.reps_max - cfg.reps_min + 1)));
      const Vector theta = truth.theta.row(l).transpose();
      for (int j = 1; j <= reps; ++j) {
        Record r;
        r.writer = truth.writer;
        r.character = l;
        r.repetition = j;
        r.features = rng.mvn(theta, w_chol);
        records.push_back(r);
      }
    }
    pop.truth.push_back(std::move(truth));
  }
  pop.data = Dataset(std::move(records));
  return pop;
}

}  // namespace hwbf::synth
