#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "hwbf/core.hpp"
#include "hwbf/random.hpp"

namespace hwbf {

/// (S, a1, b1, a2, b2, a3, b3, a4, b4) for one character repetition.
using FeatureVector = Eigen::Matrix<double, kFeatures, 1>;

/// Corner-point dummy coding of a character, reference group first.
using DesignRow = Eigen::Matrix<double, kNumLabels, 1>;

struct Record {
  int writer = 0;
  int character = 0;  // index into kLabels
  int repetition = 0;
  FeatureVector features = FeatureVector::Zero();
};

/// Immutable collection of character measurements indexed by
/// (writer, character, repetition).
class Dataset {
 public:
  Dataset() = default;

  /// Validates uniqueness of (writer, character, repetition), label range and
  /// finiteness. Record order is preserved.
  explicit Dataset(std::vector<Record> records, std::optional<FeatureVector> scaling = {})
      : records_(std::move(records)), scaling_(std::move(scaling)) {
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& r : records_) {
      if (r.character < 0 || r.character >= kNumLabels) {
        throw Error(ErrorKind::BadLabel, "character index " + std::to_string(r.character));
      }
      if (!r.features.allFinite()) {
        throw Error(ErrorKind::BadValue, "non-finite feature for writer " + std::to_string(r.writer));
      }
      if (!seen.emplace(r.writer, r.character, r.repetition).second) {
        throw Error(ErrorKind::DuplicateRecord,
                    "writer " + std::to_string(r.writer) + ", char " +
                        std::string(kLabels[r.character]) + ", rep " + std::to_string(r.repetition));
      }
    }
    if (scaling_ && !(scaling_->array() > 0.0).all()) {
      throw Error(ErrorKind::DegenerateScale, "scaling divisors must be positive");
    }
  }

  const std::vector<Record>& records() const noexcept { return records_; }
  const std::optional<FeatureVector>& scaling() const noexcept { return scaling_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Sorted distinct writer ids.
  std::vector<int> writers() const {
    std::set<int> ids;
    for (const auto& r : records_) ids.insert(r.writer);
    return {ids.begin(), ids.end()};
  }

  /// Sorted distinct character indices.
  std::vector<int> characters() const {
    std::set<int> ids;
    for (const auto& r : records_) ids.insert(r.character);
    return {ids.begin(), ids.end()};
  }

  bool has_writer(int writer) const {
    return std::any_of(records_.begin(), records_.end(),
                       [&](const Record& r) { return r.writer == writer; });
  }

  template <typename Pred>
  Dataset filter(Pred pred) const {
    std::vector<Record> out;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(out), pred);
    return Dataset(std::move(out), scaling_);
  }

  Dataset only_writer(int writer) const {
    return filter([&](const Record& r) { return r.writer == writer; });
  }
  Dataset only_character(int character) const {
    return filter([&](const Record& r) { return r.character == character; });
  }

  /// n x p feature matrix in record order.
  Matrix feature_matrix() const {
    Matrix x(static_cast<Eigen::Index>(records_.size()), kFeatures);
    for (std::size_t i = 0; i < records_.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = records_[i].features.transpose();
    }
    return x;
  }

 private:
  std::vector<Record> records_;
  std::optional<FeatureVector> scaling_;
};

/// Concatenation of two datasets that share a scaling. Records keep their ids,
/// so the union must stay unique.
inline Dataset concat(const Dataset& first, const Dataset& second) {
  std::vector<Record> all = first.records();
  all.insert(all.end(), second.records().begin(), second.records().end());
  return Dataset(std::move(all), first.scaling() ? first.scaling() : second.scaling());
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline int parse_int(std::string_view s, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw Error(ErrorKind::BadValue, "line " + std::to_string(line_no) + ": bad integer '" +
                                         std::string(s) + "'");
  }
  return v;
}

inline double parse_real(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::BadValue, "line " + std::to_string(line_no) + ": bad value '" +
                                         std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline constexpr std::string_view kCsvHeader = "writer,char,rep,S,a1,b1,a2,b2,a3,b3,a4,b4";

/// Parses the dataset CSV. LF or CRLF line endings; blank lines ignored.
inline Dataset parse_dataset(std::string_view csv_text) {
  std::vector<Record> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= csv_text.size()) {
    auto nl = csv_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv_text.size();
    std::string_view line = detail::trim(csv_text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (!header_seen) {
      std::string joined;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += ',';
        joined += fields[i];
      }
      if (joined != kCsvHeader) {
        throw Error(ErrorKind::BadHeader, "expected header '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3 + kFeatures) {
      throw Error(ErrorKind::BadValue, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(3 + kFeatures) + " fields");
    }
    Record r;
    r.writer = detail::parse_int(fields[0], line_no);
    r.character = label_index(fields[1]);
    if (r.character < 0) {
      throw Error(ErrorKind::BadLabel, "line " + std::to_string(line_no) + ": '" +
                                           std::string(fields[1]) + "'");
    }
    r.repetition = detail::parse_int(fields[2], line_no);
    for (int k = 0; k < kFeatures; ++k) r.features(k) = detail::parse_real(fields[3 + k], line_no);
    records.push_back(r);
  }
  if (!header_seen) throw Error(ErrorKind::BadHeader, "empty input");
  return Dataset(std::move(records));
}

/// CSV text with round-trip precision; scaling is not part of the format.
inline std::string to_csv(const Dataset& data) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  char buf[32];
  for (const auto& r : data.records()) {
    out << r.writer << ',' << kLabels[r.character] << ',' << r.repetition;
    for (int k = 0; k < kFeatures; ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, r.features(k));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  return out.str();
}

/// Per-feature sample standard deviation (n-1) over all records.
inline FeatureVector feature_sd(const Dataset& data) {
  if (data.size() < 2) {
    throw Error(ErrorKind::DegenerateScale, "need at least two reference records");
  }
  const Matrix x = data.feature_matrix();
  const Vector mean = x.colwise().mean();
  FeatureVector sd;
  for (int k = 0; k < kFeatures; ++k) {
    sd(k) = std::sqrt((x.col(k).array() - mean(k)).square().sum() / (x.rows() - 1.0));
  }
  return sd;
}

/// Divides every feature column of `data` by the reference's sample SD.
/// The divisors (composed with any earlier scaling) are recorded.
inline Dataset standardize(const Dataset& data, const Dataset& reference) {
  const FeatureVector sd = feature_sd(reference);
  for (int k = 0; k < kFeatures; ++k) {
    if (!(sd(k) > 0.0)) {
      throw Error(ErrorKind::DegenerateScale,
                  "feature " + std::string(kFeatureNames[k]) + " has zero variance in reference");
    }
  }
  std::vector<Record> out = data.records();
  for (auto& r : out) r.features = r.features.cwiseQuotient(sd);
  FeatureVector scaling = data.scaling() ? FeatureVector(data.scaling()->cwiseProduct(sd)) : sd;
  return Dataset(std::move(out), scaling);
}

inline DesignRow dummy_code(int character) {
  if (character < 0 || character >= kNumLabels) {
    throw Error(ErrorKind::BadLabel, "character index " + std::to_string(character));
  }
  DesignRow c = DesignRow::Zero();
  c(0) = 1.0;
  if (character > 0) c(character) = 1.0;
  return c;
}

inline DesignRow dummy_code(std::string_view label) {
  const int idx = label_index(label);
  if (idx < 0) throw Error(ErrorKind::BadLabel, "'" + std::string(label) + "'");
  return dummy_code(idx);
}

struct Split {
  Dataset questioned;
  Dataset control;
};

/// Random stratified split of one writer's records. Per character, round(pi * n)
/// repetitions (kept within [1, n-1]) go to the questioned side.
inline Split split_writer(const Dataset& data, int writer, double pi_split, std::uint64_t seed) {
  if (!(pi_split > 0.0 && pi_split < 1.0)) {
    throw Error(ErrorKind::BadConfig, "pi_split must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_char;
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].writer == writer) by_char[recs[i].character].push_back(i);
  }
  if (by_char.empty()) throw Error(ErrorKind::UnknownWriter, "writer " + std::to_string(writer));

  std::vector<bool> questioned(recs.size(), false);
  for (auto& [character, idx] : by_char) {
    const long n = static_cast<long>(idx.size());
    if (n < 2) {
      throw Error(ErrorKind::SplitInfeasible, "writer " + std::to_string(writer) + " has " +
                                                  std::to_string(n) + " repetition(s) of '" +
                                                  std::string(kLabels[character]) + "'");
    }
    const long k = std::clamp(std::lround(pi_split * static_cast<double>(n)), 1L, n - 1);
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(writer),
                               static_cast<std::uint64_t>(character)}));
    for (long i = n - 1; i > 0; --i) {
      std::swap(idx[static_cast<std::size_t>(i)], idx[rng.index(static_cast<std::size_t>(i + 1))]);
    }
    for (long i = 0; i < k; ++i) questioned[idx[static_cast<std::size_t>(i)]] = true;
  }
  std::vector<Record> q, c;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].writer != writer) continue;
    (questioned[i] ? q : c).push_back(recs[i]);
  }
  return {Dataset(std::move(q), data.scaling()), Dataset(std::move(c), data.scaling())};
}

inline Dataset background_excluding(const Dataset& data, const std::set<int>& writers) {
  return data.filter([&](const Record& r) { return !writers.count(r.writer); });
}

}  // namespace hwbf
