#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "hwbf/dataset.hpp"

using namespace hwbf;

namespace {

std::string row(int writer, const char* c, int rep, double s) {
  return std::to_string(writer) + "," + c + "," + std::to_string(rep) + "," + std::to_string(s) +
         ",0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8\n";
}

std::string header() { return std::string(kCsvHeader) + "\n"; }

Dataset grid(int writers, int reps) {
  std::vector<Record> recs;
  Rng rng(11);
  for (int w = 1; w <= writers; ++w) {
    for (int c = 0; c < kNumLabels; ++c) {
      for (int j = 1; j <= reps; ++j) {
        Record r{w, c, j, FeatureVector::Zero()};
        for (int k = 0; k < kFeatures; ++k) r.features(k) = rng.normal() + k;
        recs.push_back(r);
      }
    }
  }
  return Dataset(std::move(recs));
}

}  // namespace

TEST(ParseDataset, SingleRow) {
  const auto d = parse_dataset(header() + "1,a,1,1.0,0.1,0,0,0,0,0,0,0.0\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.records()[0].writer, 1);
  EXPECT_EQ(d.records()[0].character, 0);
  EXPECT_DOUBLE_EQ(d.records()[0].features(1), 0.1);
  EXPECT_FALSE(d.scaling().has_value());
}

TEST(ParseDataset, CrlfAndBlankLines) {
  std::string text = header() + row(2, "q", 3, 1.5) + "\r\n" + row(1, "d", 1, 2.0);
  for (std::size_t i = text.find('\n'); i != std::string::npos; i = text.find('\n', i + 2)) text.insert(i, "\r");
  const auto d = parse_dataset(text);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.records()[0].writer, 2);
  EXPECT_EQ(d.records()[0].character, 3);
  EXPECT_EQ(d.records()[1].character, 1);
}

TEST(ParseDataset, Errors) {
  auto kind_of = [](const std::string& text) {
    try {
      parse_dataset(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::BadConfig;
  };
  EXPECT_EQ(kind_of(header() + row(1, "a", 1, 1) + row(1, "a", 1, 2)), ErrorKind::DuplicateRecord);
  EXPECT_EQ(kind_of(header() + row(1, "z", 1, 1)), ErrorKind::BadLabel);
  EXPECT_EQ(kind_of(header() + "1,a,1,nan,0,0,0,0,0,0,0,0\n"), ErrorKind::BadValue);
  EXPECT_EQ(kind_of(header() + "1,a,1,inf,0,0,0,0,0,0,0,0\n"), ErrorKind::BadValue);
  EXPECT_EQ(kind_of(header() + "1,a,1,1,0,0\n"), ErrorKind::BadValue);
  EXPECT_EQ(kind_of("writer,char\n"), ErrorKind::BadHeader);
  EXPECT_EQ(kind_of(""), ErrorKind::BadHeader);
}

TEST(ParseDataset, CsvRoundTripIsExact) {
  const auto d = grid(3, 4);
  const auto back = parse_dataset(to_csv(d));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.records()[i].writer, d.records()[i].writer);
    EXPECT_EQ(back.records()[i].features, d.records()[i].features);
  }
}

TEST(DatasetType, RejectsNonPositiveScaling) {
  FeatureVector s = FeatureVector::Ones();
  s(4) = 0.0;
  EXPECT_THROW(Dataset({}, s), Error);
}

TEST(Standardize, TwoPointSd) {
  const Dataset ref({{1, 0, 1, FeatureVector::Constant(1.0)}, {1, 0, 2, FeatureVector::Constant(3.0)}});
  const Dataset data({{5, 1, 1, FeatureVector::Constant(3.0)}});
  const auto out = standardize(data, ref);
  EXPECT_NEAR(out.records()[0].features(0), 3.0 / std::sqrt(2.0), 1e-12);
  ASSERT_TRUE(out.scaling().has_value());
  EXPECT_NEAR((*out.scaling())(0), std::sqrt(2.0), 1e-12);
}

TEST(Standardize, ConstantColumnIsDegenerate) {
  const auto ref = parse_dataset(header() + row(1, "a", 1, 1.0) + row(1, "a", 2, 1.0));
  try {
    standardize(ref, ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateScale);
  }
}

TEST(Standardize, UnitSdAndIdempotent) {
  const auto d = grid(4, 6);
  const auto once = standardize(d, d);
  const Matrix x = once.feature_matrix();
  for (int k = 0; k < kFeatures; ++k) {
    const double mean = x.col(k).mean();
    const double var = (x.col(k).array() - mean).square().sum() / (x.rows() - 1);
    EXPECT_NEAR(std::sqrt(var), 1.0, 1e-12);
  }
  const auto twice = standardize(once, once);
  EXPECT_LT((twice.feature_matrix() - x).cwiseAbs().maxCoeff(), 1e-12);
  const auto original_sd = feature_sd(d);
  EXPECT_LT((*twice.scaling() - original_sd).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DummyCode, CornerPoint) {
  EXPECT_EQ(dummy_code("a"), (DesignRow() << 1, 0, 0, 0).finished());
  EXPECT_EQ(dummy_code("d"), (DesignRow() << 1, 1, 0, 0).finished());
  EXPECT_EQ(dummy_code("o"), (DesignRow() << 1, 0, 1, 0).finished());
  EXPECT_EQ(dummy_code("q"), (DesignRow() << 1, 0, 0, 1).finished());
  EXPECT_THROW(dummy_code("x"), Error);
  for (int c = 0; c < kNumLabels; ++c) {
    const auto r = dummy_code(c);
    EXPECT_EQ(r(0), 1.0);
    EXPECT_TRUE(r.sum() == 1.0 || r.sum() == 2.0);
  }
}

TEST(SplitWriter, ExactHalvingAndDeterminism) {
  const auto d = grid(2, 10);
  const auto a = split_writer(d, 1, 0.5, 99);
  const auto b = split_writer(d, 1, 0.5, 99);
  for (int c = 0; c < kNumLabels; ++c) {
    EXPECT_EQ(a.questioned.only_character(c).size(), 5u);
    EXPECT_EQ(a.control.only_character(c).size(), 5u);
  }
  ASSERT_EQ(a.questioned.size(), b.questioned.size());
  for (std::size_t i = 0; i < a.questioned.size(); ++i) {
    EXPECT_EQ(a.questioned.records()[i].repetition, b.questioned.records()[i].repetition);
  }
}

TEST(SplitWriter, RoundingRule) {
  const auto d = grid(1, 20);
  const auto s = split_writer(d, 1, 0.35, 3);
  EXPECT_EQ(s.questioned.only_character(2).size(), 7u);
  EXPECT_EQ(s.control.only_character(2).size(), 13u);
}

TEST(SplitWriter, PartitionForManySeeds) {
  const auto d = grid(2, 7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double pi = 0.05 + 0.045 * static_cast<double>(seed);
    const auto s = split_writer(d, 2, pi, seed);
    std::set<std::pair<int, int>> q, c;
    for (const auto& r : s.questioned.records()) q.emplace(r.character, r.repetition);
    for (const auto& r : s.control.records()) c.emplace(r.character, r.repetition);
    EXPECT_EQ(q.size() + c.size(), 4u * 7u);
    for (const auto& k : q) EXPECT_FALSE(c.count(k));
    for (int ch = 0; ch < kNumLabels; ++ch) {
      EXPECT_GE(s.questioned.only_character(ch).size(), 1u);
      EXPECT_GE(s.control.only_character(ch).size(), 1u);
    }
  }
}

TEST(SplitWriter, Errors) {
  const auto d = grid(2, 5);
  try {
    split_writer(d, 9, 0.5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownWriter);
  }
  const auto single = parse_dataset(header() + row(1, "a", 1, 1.0) + row(1, "d", 1, 1.0) + row(1, "d", 2, 1.0));
  try {
    split_writer(single, 1, 0.5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SplitInfeasible);
  }
}

TEST(BackgroundExcluding, Cardinality) {
  const auto d = grid(13, 2);
  EXPECT_EQ(background_excluding(d, {}).size(), d.size());
  EXPECT_EQ(background_excluding(d, {1}).writers().size(), 12u);
  const auto writers = d.writers();
  const std::set<int> all(writers.begin(), writers.end());
  EXPECT_TRUE(background_excluding(d, all).empty());
}
