#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "gsml/error.hpp"
#include "gsml/feature_store.hpp"
#include "gsml/synthetic.hpp"
#include "support.hpp"

using namespace gsml;
using gsml::testing::random_features;
using gsml::testing::random_table;
using gsml::testing::random_unit;
using gsml::testing::TempDir;

namespace {

std::vector<double> row_of(const LookupTable& t, std::size_t i) {
  auto r = t.row(i);
  return {r.begin(), r.end()};
}

}  // namespace

TEST(FeatureVector, EnforcesUnitNormAndDimension) {
  EXPECT_NO_THROW(FeatureVector({0.6, 0.8}));
  EXPECT_THROW(FeatureVector({1.0}), ValidationError);
  EXPECT_THROW(FeatureVector({1.0, 1.0}), ValidationError);
  EXPECT_THROW(FeatureVector({std::numeric_limits<double>::quiet_NaN(), 1.0}), ValidationError);
  const auto z = FeatureVector::normalized({3.0, 4.0});
  EXPECT_DOUBLE_EQ(z[0], 0.6);
  EXPECT_DOUBLE_EQ(z[1], 0.8);
  EXPECT_THROW(FeatureVector::normalized({0.0, 0.0}), ValidationError);
}

TEST(InitTable, CopiesFeaturesAndStartsAtStepZero) {
  const std::vector<FeatureVector> f{FeatureVector({1, 0}), FeatureVector({0, 1})};
  const LookupTable t = init_table(f);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.step(), 0u);
  EXPECT_EQ(row_of(t, 0), (std::vector<double>{1, 0}));
  EXPECT_EQ(row_of(t, 1), (std::vector<double>{0, 1}));
  EXPECT_EQ(t.unwritten_count(), 0u);
}

TEST(InitTable, SingleRow) {
  const std::vector<FeatureVector> f{FeatureVector({0.6, 0.8})};
  const LookupTable t = init_table(f);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(row_of(t, 0), (std::vector<double>{0.6, 0.8}));
}

TEST(InitTable, RejectsMixedDimensions) {
  const std::vector<FeatureVector> f{FeatureVector({1, 0}), FeatureVector({0, 0, 1})};
  EXPECT_THROW(init_table(f), ValidationError);
  EXPECT_THROW(init_table({}), ValidationError);
}

TEST(InitTable, GeneratedDatasetRowsAreUnitNorm) {
  DatasetSpec spec;
  const Dataset data = generate(spec);
  std::vector<FeatureVector> f;
  for (const auto& s : data.samples) f.push_back(FeatureVector::normalized(s.raw));
  const LookupTable t = init_table(f);
  ASSERT_EQ(t.size(), 400u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double sq = 0.0;
    for (double v : t.row(i)) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
}

TEST(SimilarityRow, Examples) {
  const std::vector<FeatureVector> basis{FeatureVector({1, 0}), FeatureVector({0, 1})};
  EXPECT_EQ(similarity_row(init_table(basis), FeatureVector({1, 0})),
            (SimilarityVector{1.0, 0.0}));

  const std::vector<FeatureVector> rows{FeatureVector({1, 0}), FeatureVector({0.8, 0.6})};
  const auto s = similarity_row(init_table(rows), FeatureVector({0.6, 0.8}));
  EXPECT_NEAR(s[0], 0.6, 1e-15);
  EXPECT_NEAR(s[1], 0.96, 1e-15);
}

TEST(SimilarityRow, MatchesElementwiseLoop) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t d = 2 + rng() % 7;
    const LookupTable t = random_table(rng, n, d);
    const FeatureVector z(random_unit(rng, d));
    const auto s = similarity_row(t, z);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += z[k] * t.rows()(j, k);
      EXPECT_NEAR(s[j], acc, 1e-12);
      EXPECT_GE(s[j], -1.0 - 1e-9);
      EXPECT_LE(s[j], 1.0 + 1e-9);
    }
  }
}

TEST(SimilarityRow, RejectsDimensionMismatch) {
  std::mt19937_64 rng(1);
  const LookupTable t = random_table(rng, 3, 4);
  EXPECT_THROW(similarity_row(t, FeatureVector({1, 0})), ValidationError);
}

TEST(UpdateRow, Bisector) {
  std::vector<FeatureVector> f{FeatureVector({1, 0})};
  LookupTable t = init_table(f);
  EXPECT_EQ(t.update_row(0, FeatureVector({0, 1})), UpdateStatus::kAveraged);
  EXPECT_NEAR(t.row(0)[0], 0.70710678, 1e-8);
  EXPECT_NEAR(t.row(0)[1], 0.70710678, 1e-8);
}

TEST(UpdateRow, IdempotentOnEqualVectors) {
  std::vector<FeatureVector> f{FeatureVector({1, 0})};
  LookupTable t = init_table(f);
  t.update_row(0, FeatureVector({1, 0}));
  EXPECT_EQ(row_of(t, 0), (std::vector<double>{1, 0}));
}

TEST(UpdateRow, AntipodalIsDegenerateNoOp) {
  std::vector<FeatureVector> f{FeatureVector({1, 0})};
  LookupTable t = init_table(f);
  EXPECT_EQ(t.update_row(0, FeatureVector({-1, 0})), UpdateStatus::kDegenerate);
  EXPECT_EQ(row_of(t, 0), (std::vector<double>{1, 0}));
}

TEST(UpdateRow, FirstWriteOfEmptyRowCopies) {
  LookupTable t(2, 2);
  EXPECT_EQ(t.unwritten_count(), 2u);
  EXPECT_FALSE(t.written(1));
  EXPECT_EQ(t.update_row(1, FeatureVector({0.6, 0.8})), UpdateStatus::kInitialized);
  EXPECT_TRUE(t.written(1));
  EXPECT_EQ(row_of(t, 1), (std::vector<double>{0.6, 0.8}));
  EXPECT_EQ(t.unwritten_count(), 1u);
}

TEST(UpdateRow, RejectsBadIndexOrDimension) {
  LookupTable t(2, 2);
  EXPECT_THROW(t.update_row(2, FeatureVector({1, 0})), ValidationError);
  EXPECT_THROW(t.update_row(0, FeatureVector({1, 0, 0})), ValidationError);
}

TEST(UpdateRow, CommutesWithRotation) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = std::uniform_real_distribution<double>(0, 6.283)(rng);
    const double c = std::cos(theta), s = std::sin(theta);
    auto rot = [&](std::span<const double> v) {
      return std::vector<double>{c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]};
    };
    const auto m = random_unit(rng, 3);
    const auto z = random_unit(rng, 3);
    std::vector<FeatureVector> a{FeatureVector(m)};
    std::vector<FeatureVector> b{FeatureVector::normalized(rot(m))};
    LookupTable ta = init_table(a), tb = init_table(b);
    ta.update_row(0, FeatureVector(z));
    tb.update_row(0, FeatureVector::normalized(rot(z)));
    const auto expected = rot(ta.row(0));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(tb.row(0)[k], expected[k], 1e-9);
  }
}

TEST(UpdateRow, RowsStayUnitNormUnderRandomSequences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 10, d = 2 + rng() % 6;
    LookupTable t(n, d);
    for (int op = 0; op < 200; ++op) {
      if (rng() % 20 == 0) {
        t.reinitialize(random_features(rng, n, d));
      } else {
        t.update_row(rng() % n, FeatureVector(random_unit(rng, d)));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (t.written(i)) {
        EXPECT_NEAR(norm2(t.row(i)), 1.0, 1e-6);
      }
    }
  }
}

TEST(Reinitialize, OverwritesRowsAndKeepsStep) {
  std::vector<FeatureVector> f{FeatureVector({1, 0}), FeatureVector({0.6, 0.8})};
  LookupTable t = init_table(f);
  t.set_step(17);
  std::vector<FeatureVector> g{FeatureVector({0, 1}), FeatureVector({1, 0})};
  t.reinitialize(g);
  EXPECT_EQ(row_of(t, 0), (std::vector<double>{0, 1}));
  EXPECT_EQ(row_of(t, 1), (std::vector<double>{1, 0}));
  EXPECT_EQ(t.step(), 17u);
}

TEST(Reinitialize, WithOwnRowsIsFixedPoint) {
  std::mt19937_64 rng(4);
  LookupTable t = random_table(rng, 6, 3);
  const Matrix before = t.rows();
  std::vector<FeatureVector> own;
  for (std::size_t i = 0; i < t.size(); ++i) own.emplace_back(row_of(t, i));
  t.reinitialize(own);
  EXPECT_EQ(t.rows(), before);
}

TEST(Reinitialize, RejectsCountMismatch) {
  std::mt19937_64 rng(4);
  LookupTable t = random_table(rng, 3, 2);
  EXPECT_THROW(t.reinitialize(random_features(rng, 2, 2)), ValidationError);
}

TEST(TableSnapshot, RoundTripsBitExactly) {
  TempDir dir("table");
  std::mt19937_64 rng(8);
  LookupTable t = random_table(rng, 7, 5);
  t.set_step(123456789012ULL);
  t.save(dir / "t.gslt");
  const LookupTable back = LookupTable::load(dir / "t.gslt");
  EXPECT_EQ(back.rows(), t.rows());
  EXPECT_EQ(back.step(), t.step());
  EXPECT_EQ(std::filesystem::file_size(dir / "t.gslt"), 4u + 4u + 4u + 8u + 7u * 5u * 8u);
}

TEST(TableSnapshot, HeaderIsLittleEndian) {
  TempDir dir("table_hdr");
  std::vector<FeatureVector> f{FeatureVector({1, 0}), FeatureVector({0, 1}),
                               FeatureVector({0.6, 0.8})};
  LookupTable t = init_table(f);
  t.set_step(2);
  t.save(dir / "t.gslt");
  std::ifstream in(dir / "t.gslt", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "GSLT");
  EXPECT_EQ(bytes[4], 3);  // n
  EXPECT_EQ(bytes[8], 2);  // d
  EXPECT_EQ(bytes[12], 2);  // step
  // 1.0 as IEEE-754 little-endian: 00 .. 00 f0 3f
  EXPECT_EQ(bytes[20 + 6], 0xf0);
  EXPECT_EQ(bytes[20 + 7], 0x3f);
}

TEST(TableSnapshot, UnwrittenRowsSurvive) {
  TempDir dir("table_empty");
  LookupTable t(3, 2);
  t.update_row(1, FeatureVector({0, 1}));
  t.save(dir / "t.gslt");
  const LookupTable back = LookupTable::load(dir / "t.gslt");
  EXPECT_FALSE(back.written(0));
  EXPECT_TRUE(back.written(1));
  EXPECT_FALSE(back.written(2));
}

TEST(TableSnapshot, RejectsCorruptFiles) {
  TempDir dir("table_bad");
  std::mt19937_64 rng(9);
  random_table(rng, 2, 2).save(dir / "ok.gslt");
  std::ifstream in(dir / "ok.gslt", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});

  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  EXPECT_THROW(LookupTable::load(write("magic", "GSEW" + bytes.substr(4))), IoError);
  EXPECT_THROW(LookupTable::load(write("short", bytes.substr(0, bytes.size() - 3))), IoError);
  EXPECT_THROW(LookupTable::load(write("long", bytes + "x")), IoError);
  EXPECT_THROW(LookupTable::load(dir / "missing.gslt"), IoError);
}
