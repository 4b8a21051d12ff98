#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "toxel/agreement.hpp"

using namespace toxel;

TEST(Agreement, IdenticalLists) {
  const std::vector<BettiVector> a{{{1, 0, 0, 1}}, {{1, 2, 3, 4}}, {{1, 1, 2, 1}}};
  const AgreementReport r = agreement(a, a);
  for (double v : r.per_beta) EXPECT_EQ(v, 100.0);
  EXPECT_EQ(r.combined, 100.0);
  EXPECT_EQ(r.complete, 100.0);
  EXPECT_EQ(r.count, 3u);
}

TEST(Agreement, TabulatedCombinedAccuracies) {
  EXPECT_EQ(round2(combined_accuracy({100, 50.2, 44.23, 12.88})), 51.83);
  EXPECT_EQ(round2(combined_accuracy({100, 91.74, 78.26, 92.78})), 90.70);
}

TEST(Agreement, HandCountedExample) {
  const std::vector<BettiVector> labels{{{1, 0, 0, 1}}, {{1, 1, 0, 2}}, {{1, 1, 2, 1}}, {{1, 0, 1, 1}}};
  const std::vector<BettiVector> got{{{1, 0, 0, 1}}, {{1, 0, 0, 2}}, {{1, 1, 1, 0}}, {{2, 0, 1, 1}}};
  const AgreementReport r = agreement(labels, got);
  EXPECT_EQ(r.per_beta[0], 75.0);
  EXPECT_EQ(r.per_beta[1], 75.0);
  EXPECT_EQ(r.per_beta[2], 75.0);
  EXPECT_EQ(r.per_beta[3], 75.0);
  EXPECT_EQ(r.combined, 75.0);
  EXPECT_EQ(r.complete, 25.0);
}

TEST(Agreement, LengthMismatchThrows) {
  const std::vector<BettiVector> a(3), b(2);
  EXPECT_THROW(agreement(a, b), ShapeError);
  EXPECT_EQ(agreement(std::vector<BettiVector>{}, std::vector<BettiVector>{}).count, 0u);
}

TEST(Agreement, ReportInvariants) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 2);
  for (int t = 0; t < 200; ++t) {
    std::vector<BettiVector> a(25), b(25);
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        a[i][k] = v(rng);
        b[i][k] = v(rng);
      }
    const AgreementReport r = agreement(a, b);
    double lo = 100;
    for (double p : r.per_beta) lo = std::min(lo, p);
    EXPECT_LE(r.complete, lo);
    EXPECT_DOUBLE_EQ(r.combined, (r.per_beta[0] + r.per_beta[1] + r.per_beta[2] + r.per_beta[3]) / 4);
  }
}

TEST(Agreement, RoundingHalfUp) {
  EXPECT_EQ(round2(90.695), 90.70);
  EXPECT_EQ(round2(51.8275), 51.83);
  EXPECT_EQ(round2(12.344), 12.34);
  EXPECT_EQ(round2(100.0), 100.0);
  EXPECT_EQ(round2(0.0), 0.0);
}
