#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dtrack/assignment.hpp"
#include "test_support.hpp"

using dtrack::CostMatrix;

namespace {

CostMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size(), m = rows.begin()->size();
  CostMatrix c(n, m);
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t k = 0;
    for (double v : row) c(r, k++) = v;
    ++r;
  }
  return c;
}

double summed(const CostMatrix& c, const dtrack::MatchSet& s) {
  double t = 0;
  for (auto [r, k] : s.pairs) t += c(r, k);
  return t;
}

void expect_valid_matching(const CostMatrix& c, const dtrack::MatchSet& s) {
  std::set<std::size_t> rows, cols;
  for (auto [r, k] : s.pairs) {
    EXPECT_LT(r, c.rows());
    EXPECT_LT(k, c.cols());
    EXPECT_TRUE(rows.insert(r).second);
    EXPECT_TRUE(cols.insert(k).second);
  }
  EXPECT_EQ(s.pairs.size() + s.unmatched_rows.size(), c.rows());
  EXPECT_EQ(s.pairs.size() + s.unmatched_cols.size(), c.cols());
}

}  // namespace

TEST(Hungarian, TwoByTwo) {
  const auto c = from_rows({{1, 2}, {3, 0}});
  const auto s = dtrack::hungarian(c);
  EXPECT_DOUBLE_EQ(s.total_cost, 1.0);
  ASSERT_EQ(s.pairs.size(), 2u);
  EXPECT_EQ(s.pairs[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(s.pairs[1], std::make_pair(std::size_t{1}, std::size_t{1}));
}

TEST(Hungarian, ClassicThreeByThree) {
  const auto c = from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
  EXPECT_DOUBLE_EQ(dtrack::hungarian(c).total_cost, 5.0);
}

TEST(Hungarian, RectangularLeavesExtras) {
  const auto wide = from_rows({{5, 1, 9}});
  const auto s = dtrack::hungarian(wide);
  ASSERT_EQ(s.pairs.size(), 1u);
  EXPECT_EQ(s.pairs[0].second, 1u);
  EXPECT_EQ(s.unmatched_cols, (std::vector<std::size_t>{0, 2}));

  const auto tall = from_rows({{5}, {1}, {9}});
  const auto t = dtrack::hungarian(tall);
  ASSERT_EQ(t.pairs.size(), 1u);
  EXPECT_EQ(t.pairs[0].first, 1u);
  EXPECT_EQ(t.unmatched_rows, (std::vector<std::size_t>{0, 2}));
}

TEST(Hungarian, EmptyMatrix) {
  const auto s = dtrack::hungarian(CostMatrix(0, 3));
  EXPECT_TRUE(s.pairs.empty());
  EXPECT_EQ(s.unmatched_cols.size(), 3u);
}

TEST(Hungarian, RejectsNonFinite) {
  CostMatrix c(2, 2, 1.0);
  c(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dtrack::hungarian(c), std::invalid_argument);
}

TEST(HungarianOracle, IntegerCostsMatchBruteForceExactly) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim(1, 7), val(0, 20);
  for (int trial = 0; trial < 300; ++trial) {
    CostMatrix c(static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t k = 0; k < c.cols(); ++k) c(r, k) = val(rng);
    const auto s = dtrack::hungarian(c);
    expect_valid_matching(c, s);
    EXPECT_EQ(s.pairs.size(), std::min(c.rows(), c.cols()));
    EXPECT_EQ(s.total_cost, testsupport::brute_force_assignment(c));
    EXPECT_EQ(s.total_cost, summed(c, s));
  }
}

TEST(HungarianOracle, RealCostsMatchBruteForce) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> dim(1, 7);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    CostMatrix c(static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t k = 0; k < c.cols(); ++k) c(r, k) = val(rng);
    EXPECT_NEAR(dtrack::hungarian(c).total_cost, testsupport::brute_force_assignment(c), 1e-9);
  }
}

TEST(AssignWithLimit, NeverMatchesAboveLimit) {
  const auto c = from_rows({{0.1, 0.9}, {0.95, 0.8}});
  const auto s = dtrack::assign_with_limit(c, 0.7);
  ASSERT_EQ(s.pairs.size(), 1u);
  EXPECT_EQ(s.pairs[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(s.unmatched_rows, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.unmatched_cols, (std::vector<std::size_t>{1}));
}

TEST(AssignWithLimit, AntiDiagonalBelowLimit) {
  const auto c = from_rows({{0.5, 0.0}, {0.0, 0.9}});
  const auto s = dtrack::assign_with_limit(c, 0.6);
  EXPECT_EQ(s.pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(s.total_cost, 0.0);
}

TEST(AssignWithLimit, EquivalentToBruteForceWithUnmatchedPenalty) {
  // oracle: brute force on the matrix with entries above the limit replaced by
  // the cost of leaving both ends unmatched
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    CostMatrix c(static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t k = 0; k < c.cols(); ++k) c(r, k) = val(rng);
    const double limit = 0.5;
    CostMatrix capped = c;
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t k = 0; k < c.cols(); ++k) capped(r, k) = std::min(c(r, k), limit) - limit;
    const double best = testsupport::brute_force_assignment(capped);
    const auto s = dtrack::assign_with_limit(c, limit);
    expect_valid_matching(c, s);
    double got = 0;
    for (auto [r, k] : s.pairs) {
      EXPECT_LE(c(r, k), limit);
      got += c(r, k) - limit;
    }
    EXPECT_NEAR(got, best, 1e-9);
  }
}
