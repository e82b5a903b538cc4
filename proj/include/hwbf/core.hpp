#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hwbf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Number of measurements per character repetition: surface size plus four
/// (a_h, b_h) Fourier pairs.
inline constexpr int kFeatures = 9;

/// Supported loop characters. Index 0 is the reference group for dummy coding.
inline constexpr std::array<std::string_view, 4> kLabels = {"a", "d", "o", "q"};
inline constexpr int kNumLabels = static_cast<int>(kLabels.size());

inline constexpr std::array<std::string_view, kFeatures> kFeatureNames = {
    "S", "a1", "b1", "a2", "b2", "a3", "b3", "a4", "b4"};

/// How a failure is reported to a command-line caller.
enum class ErrorCategory { Usage, Data, Numerical };

enum class ErrorKind {
  // data
  DuplicateRecord,
  BadLabel,
  BadValue,
  BadHeader,
  DegenerateScale,
  UnknownWriter,
  SplitInfeasible,
  NeedMoreWriters,
  MissingCell,
  LeakageError,
  BadGrid,
  BadConfig,
  // numerical
  BadCovariance,
  BadCorrelation,
  BadAmplitude,
  Underdetermined,
  DegenerateContour,
  BadDof,
  BadVariance,
  BadModel,
  NeedMoreDraws,
  NeedMoreChains,
  EstimatorDegenerate,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateRecord: return "DuplicateRecord";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::BadValue: return "BadValue";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::UnknownWriter: return "UnknownWriter";
    case ErrorKind::SplitInfeasible: return "SplitInfeasible";
    case ErrorKind::NeedMoreWriters: return "NeedMoreWriters";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::LeakageError: return "LeakageError";
    case ErrorKind::BadGrid: return "BadGrid";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::BadCovariance: return "BadCovariance";
    case ErrorKind::BadCorrelation: return "BadCorrelation";
    case ErrorKind::BadAmplitude: return "BadAmplitude";
    case ErrorKind::Underdetermined: return "Underdetermined";
    case ErrorKind::DegenerateContour: return "DegenerateContour";
    case ErrorKind::BadDof: return "BadDof";
    case ErrorKind::BadVariance: return "BadVariance";
    case ErrorKind::BadModel: return "BadModel";
    case ErrorKind::NeedMoreDraws: return "NeedMoreDraws";
    case ErrorKind::NeedMoreChains: return "NeedMoreChains";
    case ErrorKind::EstimatorDegenerate: return "EstimatorDegenerate";
  }
  return "Unknown";
}

inline ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadConfig:
      return ErrorCategory::Usage;
    case ErrorKind::DuplicateRecord:
    case ErrorKind::BadLabel:
    case ErrorKind::BadValue:
    case ErrorKind::BadHeader:
    case ErrorKind::DegenerateScale:
    case ErrorKind::UnknownWriter:
    case ErrorKind::SplitInfeasible:
    case ErrorKind::NeedMoreWriters:
    case ErrorKind::MissingCell:
    case ErrorKind::LeakageError:
    case ErrorKind::BadGrid:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Numerical;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

/// Index of a character label in kLabels, or -1.
inline int label_index(std::string_view label) {
  for (int i = 0; i < kNumLabels; ++i) {
    if (kLabels[i] == label) return i;
  }
  return -1;
}

}  // namespace hwbf
