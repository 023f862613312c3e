#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gsml/error.hpp"
#include "gsml/smlc.hpp"
#include "support.hpp"

using namespace gsml;
using gsml::testing::four_node_table;
using gsml::testing::random_label;
using gsml::testing::random_table;
using gsml::testing::random_unit;

namespace {

MultiLabel label_of(std::vector<std::uint8_t> bits, std::size_t owner) {
  return MultiLabel(std::move(bits), owner);
}

// Loss of an arbitrary (not necessarily unit) z with the mined set held fixed.
double fixed_set_loss(std::span<const double> z, const LookupTable& t, const MultiLabel& label,
                      const CandidateSet& mined) {
  const auto s = similarity_row(t, z);
  double pos = 0.0;
  std::size_t np = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!label[j]) continue;
    pos += (s[j] - 1.0) * (s[j] - 1.0);
    ++np;
  }
  double neg = 0.0;
  for (std::size_t k : mined) neg += (s[k] + 1.0) * (s[k] + 1.0);
  return pos / static_cast<double>(np) + (mined.empty() ? 0.0 : neg / static_cast<double>(mined.size()));
}

double vector_relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-8});
}

}  // namespace

TEST(HardNegativeCount, IsCeilingOfFraction) {
  EXPECT_EQ(hard_negative_count(0.5, 2), 1u);
  EXPECT_EQ(hard_negative_count(1.0, 2), 2u);
  EXPECT_EQ(hard_negative_count(0.01, 396), 4u);
  EXPECT_EQ(hard_negative_count(0.01, 400), 4u);
  EXPECT_EQ(hard_negative_count(0.01, 401), 5u);
  EXPECT_EQ(hard_negative_count(0.001, 3), 1u);
  EXPECT_EQ(hard_negative_count(0.4, 0), 0u);
  // Floating-point products that land a hair above an integer.
  EXPECT_EQ(hard_negative_count(0.1, 30), 3u);
  EXPECT_EQ(hard_negative_count(0.07, 100), 7u);
}

TEST(HardNegatives, Examples) {
  const std::vector<double> s{1, .9848, .1736, 0};
  const auto label = label_of({1, 1, 0, 0}, 0);
  EXPECT_EQ(hard_negatives(s, label, 0.5), (CandidateSet{2}));
  EXPECT_EQ(hard_negatives(s, label, 1.0), (CandidateSet{2, 3}));
  EXPECT_TRUE(hard_negatives(s, label_of({1, 1, 1, 1}, 0), 0.5).empty());
}

TEST(HardNegatives, TiesByIndexAndEligibility) {
  const std::vector<double> s{1, 0.3, 0.3, 0.3};
  const auto label = label_of({1, 0, 0, 0}, 0);
  EXPECT_EQ(hard_negatives(s, label, 0.5), (CandidateSet{1, 2}));
  const std::vector<std::uint8_t> eligible{1, 0, 1, 1};
  EXPECT_EQ(hard_negatives(s, label, 0.5, eligible), (CandidateSet{2}));
}

TEST(HardNegatives, RejectsBadInput) {
  const std::vector<double> s{1, 0};
  const auto label = label_of({1, 0}, 0);
  EXPECT_THROW(hard_negatives(s, label, 0.0), ValidationError);
  EXPECT_THROW(hard_negatives(s, label, 1.01), ValidationError);
  EXPECT_THROW(hard_negatives(std::vector<double>{1}, label, 0.5), ValidationError);
  const std::vector<double> bad{1, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(smlc_loss(bad, label, 0.5), ValidationError);
}

TEST(SmlcLoss, Examples) {
  EXPECT_EQ(smlc_loss(std::vector<double>{1.0}, MultiLabel(1, 0), 0.01).total, 0.0);

  const auto two = smlc_loss(std::vector<double>{0.5, 0.5}, label_of({1, 0}, 0), 1.0);
  EXPECT_DOUBLE_EQ(two.positive_part, 0.25);
  EXPECT_DOUBLE_EQ(two.negative_part, 2.25);
  EXPECT_DOUBLE_EQ(two.total, 2.5);

  const std::vector<double> s{1, .9848, .1736, 0};
  const auto four = smlc_loss(s, label_of({1, 1, 0, 0}, 0), 0.5);
  EXPECT_NEAR(four.positive_part, (0.0152 * 0.0152) / 2.0, 1e-12);
  EXPECT_NEAR(four.negative_part, 1.1736 * 1.1736, 1e-12);
  EXPECT_NEAR(four.total, 1.3774, 1e-4);
  EXPECT_EQ(four.hard_negative_indices, (CandidateSet{2}));
}

TEST(SmlcLoss, ExcludeSelfDropsOwnerTerm) {
  const std::vector<double> s{0.0, 0.5, -1.0};
  const auto label = label_of({1, 1, 0}, 0);
  EXPECT_DOUBLE_EQ(smlc_loss(s, label, SmlcConfig{1.0, false}).positive_part, (1.0 + 0.25) / 2.0);
  EXPECT_DOUBLE_EQ(smlc_loss(s, label, SmlcConfig{1.0, true}).positive_part, 0.25);
}

TEST(SmlcLoss, Properties) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<double> s(n);
    for (auto& v : s) v = u(rng);
    const auto label = random_label(rng, n, rng() % n, 0.3);
    const double gamma = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const auto loss = smlc_loss(s, label, gamma);
    EXPECT_GE(loss.positive_part, 0.0);
    EXPECT_GE(loss.negative_part, 0.0);
    EXPECT_NEAR(loss.total, loss.positive_part + loss.negative_part, 1e-12);
    std::size_t negatives = n - label.positive_count();
    EXPECT_EQ(loss.hard_negative_indices.size(), hard_negative_count(gamma, negatives));
    for (std::size_t k : loss.hard_negative_indices) {
      EXPECT_FALSE(label[k]);
      // Raising a mined negative's similarity never lowers the negative part.
      auto raised = s;
      raised[k] = std::min(1.0, raised[k] + 0.1);
      EXPECT_GE(smlc_loss(raised, label, gamma).negative_part, loss.negative_part - 1e-12);
    }
  }
}

TEST(SmlcLoss, ZeroOnlyAtTargets) {
  const std::vector<double> s{1.0, 1.0, -1.0, -1.0};
  EXPECT_EQ(smlc_loss(s, label_of({1, 1, 0, 0}, 0), 1.0).total, 0.0);
  const std::vector<double> t{1.0, 1.0, -0.99, -1.0};
  EXPECT_GT(smlc_loss(t, label_of({1, 1, 0, 0}, 0), 1.0).total, 0.0);
}

TEST(SmlcGradient, Examples) {
  const std::vector<FeatureVector> f{FeatureVector({1, 0})};
  const LookupTable t = init_table(f);
  const std::vector<double> at_optimum{1, 0};
  EXPECT_EQ(smlc_gradient(at_optimum, t, MultiLabel(1, 0), 0.5), (std::vector<double>{0, 0}));
  const std::vector<double> orthogonal{0, 1};
  EXPECT_EQ(smlc_gradient(orthogonal, t, MultiLabel(1, 0), 0.5), (std::vector<double>{-2, 0}));
}

TEST(SmlcGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(37);
  const double h = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 16, d = 8;
    const LookupTable t = random_table(rng, n, d);
    const std::size_t owner = rng() % n;
    // Every fifth instance is positives-only (no hard negatives).
    const auto label = trial % 5 == 0 ? MultiLabel(std::vector<std::uint8_t>(n, 1), owner)
                                      : random_label(rng, n, owner, 0.3);
    const auto z = random_unit(rng, d);
    const double gamma = trial % 2 ? 0.25 : 0.01;
    const auto lg = smlc_loss_and_gradient(z, t, label, SmlcConfig{gamma, false});
    if (trial % 5 == 0) {
      EXPECT_TRUE(lg.loss.hard_negative_indices.empty());
    }
    std::vector<double> numeric(d);
    for (std::size_t k = 0; k < d; ++k) {
      auto zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      numeric[k] = (fixed_set_loss(zp, t, label, lg.loss.hard_negative_indices) -
                    fixed_set_loss(zm, t, label, lg.loss.hard_negative_indices)) /
                   (2 * h);
    }
    EXPECT_LE(vector_relative_error(lg.grad, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(SmlcGradient, IgnoresUnwrittenRows) {
  LookupTable t(3, 2);
  t.update_row(0, FeatureVector({1, 0}));
  t.update_row(2, FeatureVector({0, 1}));
  const std::vector<double> z{0.6, 0.8};
  const auto lg = smlc_loss_and_gradient(z, t, MultiLabel(3, 0), SmlcConfig{1.0, false});
  EXPECT_EQ(lg.loss.hard_negative_indices, (CandidateSet{2}));
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(ce_baseline_loss(std::vector<double>{1, 0}, label_of({1, 0}, 0), 1.0),
              -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)), 1e-12);
  EXPECT_NEAR(ce_baseline_loss(std::vector<double>{1, 0}, label_of({1, 0}, 0), 1.0), 0.31326,
              1e-5);
  EXPECT_NEAR(ce_baseline_loss(std::vector<double>{1, 1, 1}, label_of({1, 1, 0}, 0), 1.0),
              std::log(3.0), 1e-12);
  EXPECT_NEAR(ce_baseline_loss(std::vector<double>(5, 0.3), label_of({0, 0, 1, 0, 1}, 2), 0.1),
              std::log(5.0), 1e-12);
  EXPECT_THROW(ce_baseline_loss(std::vector<double>{1, 0}, label_of({1, 0}, 0), 0.0),
               ValidationError);
}

TEST(CrossEntropy, ShiftInvariantAndStable) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<double> s(n);
    for (auto& v : s) v = u(rng);
    const auto label = random_label(rng, n, rng() % n, 0.3);
    auto shifted = s;
    for (auto& v : shifted) v += 0.7;
    EXPECT_NEAR(ce_baseline_loss(s, label, 0.1), ce_baseline_loss(shifted, label, 0.1), 1e-9);
    EXPECT_TRUE(std::isfinite(ce_baseline_loss(s, label, 1e-4)));
  }
}

TEST(CrossEntropy, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(43);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const LookupTable t = random_table(rng, 12, 6);
    const auto label = random_label(rng, 12, rng() % 12, 0.3);
    const auto z = random_unit(rng, 6);
    const auto lg = ce_loss_and_gradient(z, t, label, 0.5);
    std::vector<double> numeric(6);
    for (std::size_t k = 0; k < 6; ++k) {
      auto zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      numeric[k] = (ce_baseline_loss(similarity_row(t, zp), label, 0.5) -
                    ce_baseline_loss(similarity_row(t, zm), label, 0.5)) /
                   (2 * h);
    }
    EXPECT_LE(vector_relative_error(lg.grad, numeric), 1e-4);
  }
}

TEST(SmlcLossAndGradient, FourNodeQuery) {
  const LookupTable t = four_node_table();
  const auto lg = smlc_loss_and_gradient(t.row(0), t, label_of({1, 1, 0, 0}, 0), {0.5, false});
  EXPECT_EQ(lg.loss.hard_negative_indices, (CandidateSet{2}));
  // Oracle from exact cosines; the hand value 1.3774 uses rounded similarities.
  const double sb = std::cos(10.0 * std::numbers::pi / 180.0);
  const double sc = std::cos(80.0 * std::numbers::pi / 180.0);
  const double expected = (sb - 1) * (sb - 1) / 2 + (sc + 1) * (sc + 1);
  EXPECT_NEAR(lg.loss.total, expected, 1e-12);
  EXPECT_NEAR(lg.loss.total, 1.3774, 5e-4);
}
