#include <gtest/gtest.h>

#include <random>

#include "cpcv/segmentation.hpp"
#include "oracle/oracle.hpp"
#include "test_util.hpp"

using namespace cpcv;
using cpcv::fixtures::gaussian_series;
using cpcv::fixtures::scaled;

TEST(CostTable, SmallExample) {
  const auto t = build_cost_table(Series::univariate({1, 2, 3}));
  EXPECT_NEAR(t.cost(0, 3), 2.0, 1e-12);
  EXPECT_NEAR(t.cost(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(t.cost(1, 3), 0.5, 1e-12);
}

TEST(CostTable, ConstantSeriesIsZero) {
  const auto t = build_cost_table(Series::univariate(std::vector<double>(40, 3.3)));
  for (std::size_t a = 0; a < 40; ++a) {
    for (std::size_t b = a + 1; b <= 40; ++b) EXPECT_EQ(t.cost(a, b), 0.0);
  }
}

TEST(CostTable, MatchesTwoPassResidualSum) {
  for (std::size_t d : {1u, 3u}) {
    const Series y = gaussian_series(50, 11 + d, 1.0, d);
    const auto rows = oracle::rows_of(y, 0, 1);
    const auto t = build_cost_table(y);
    for (std::size_t a = 0; a < 50; ++a) {
      for (std::size_t b = a + 1; b <= 50; ++b) {
        EXPECT_NEAR(t.cost(a, b), oracle::rss(rows, a, b), 1e-9 * (1.0 + oracle::rss(rows, a, b)));
      }
    }
  }
}

TEST(CostTable, LargeOffsetKeepsPrecision) {
  // Anchoring at the first row keeps costs accurate for far-from-zero data.
  const Series y = scaled(gaussian_series(200, 5), 1.0, 1e8);
  const auto rows = oracle::rows_of(y, 0, 1);
  const auto t = build_cost_table(y);
  EXPECT_NEAR(t.cost(0, 200), oracle::rss(rows, 0, 200), 1e-6 * oracle::rss(rows, 0, 200));
}

TEST(OptimalPartition, TwoCleanSteps) {
  const auto r = optimal_partition(Series::univariate({0, 0, 0, 5, 5, 5}), 2);
  EXPECT_EQ(r[1].cps.taus(), std::vector<std::size_t>{3});
  EXPECT_EQ(r[1].cost, 0.0);
  EXPECT_EQ(r[2].cps.taus(), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(r[2].cost, 0.0);
  EXPECT_NEAR(r[0].cost, 37.5, 1e-12);
}

TEST(OptimalPartition, ZeroChangePointsIsTotalResidual) {
  const auto r = optimal_partition(Series::univariate({1, 2, 3}), 0);
  EXPECT_EQ(r[0].cps.size(), 0u);
  EXPECT_NEAR(r[0].cost, 2.0, 1e-12);
}

TEST(OptimalPartition, SingletonSegmentsAtMaximum) {
  const auto r = optimal_partition(Series::univariate({4, 1, 7, 2}), 3);
  EXPECT_EQ(r[3].cps.taus(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(r[3].cost, 0.0);
}

TEST(OptimalPartition, Errors) {
  try {
    optimal_partition(Series::univariate({1, 2, 3}), 3);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::l_max_too_large);
  }
  try {
    brute_force_partition(gaussian_series(21, 1), 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::too_large_for_oracle);
  }
}

// Dynamic program against exhaustive search, including exact tie-breaking.
TEST(OptimalPartition, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 12;
    const std::size_t d = 1 + rng() % 2;
    const Series y = rep % 3 == 0 ? fixtures::dyadic_series(n, rep, d) : gaussian_series(n, rep, 1.0, d);
    const std::size_t lmax = std::min<std::size_t>(n - 1, 4);
    const auto dp = optimal_partition(y, lmax);
    for (std::size_t l = 0; l <= lmax; ++l) {
      const auto bf = brute_force_partition(y, l);
      EXPECT_EQ(dp[l].cps, bf.cps) << "n=" << n << " l=" << l;
      EXPECT_EQ(dp[l].cost, bf.cost);
    }
  }
}

TEST(OptimalPartition, ExhaustiveOracleAgrees) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Series y = gaussian_series(14, seed);
    const auto rows = oracle::rows_of(y, 0, 1);
    const auto dp = optimal_partition(y, 3);
    for (std::size_t l = 0; l <= 3; ++l) {
      const auto b = oracle::exhaustive_segmentation(rows, l);
      double cost = 0.0;
      for (std::size_t k = 0; k + 1 < b.size(); ++k) cost += oracle::rss(rows, b[k], b[k + 1]);
      EXPECT_NEAR(dp[l].cost, cost, 1e-9 * (1.0 + cost));
      EXPECT_EQ(dp[l].cps.boundaries(), b);
    }
  }
}

TEST(OptimalPartition, CostNonIncreasingInL) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto r = optimal_partition(gaussian_series(60, seed), 12);
    for (std::size_t l = 1; l <= 12; ++l) EXPECT_LE(r[l].cost, r[l - 1].cost);
  }
}

TEST(OptimalPartition, ShiftAndScaleInvariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Series y = fixtures::dyadic_series(40, seed);
    const auto base = optimal_partition(y, 6);
    const auto shifted = optimal_partition(scaled(y, 1.0, 17.0), 6);
    const auto doubled = optimal_partition(scaled(y, 2.0), 6);
    const auto flipped = optimal_partition(scaled(y, -1.0), 6);
    for (std::size_t l = 0; l <= 6; ++l) {
      EXPECT_EQ(base[l].cps, shifted[l].cps);
      EXPECT_EQ(base[l].cps, doubled[l].cps);
      EXPECT_EQ(base[l].cps, flipped[l].cps);
    }
  }
}

TEST(OptimalPartition, RecoversNoiselessSteps) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 30 + rng() % 50;
    std::vector<std::size_t> taus;
    for (std::size_t i = 1; i < n; ++i) {
      if (rng() % 8 == 0) taus.push_back(i);
    }
    std::vector<double> lv;
    for (std::size_t k = 0; k <= taus.size(); ++k) lv.push_back(static_cast<double>(k % 2 == 0 ? k : 100 + k));
    const auto sig = make_signal(ChangePointSet(n, taus), lv);
    const auto r = optimal_partition(sig.to_series(), taus.size());
    EXPECT_EQ(r[taus.size()].cps.taus(), taus);
    EXPECT_EQ(r[taus.size()].cost, 0.0);
  }
}

TEST(OptimalPartition, Multivariate) {
  const Series y = Series::from_rows({{0, 0}, {0, 0}, {0, 1}, {0, 1}, {3, 1}});
  const auto r = optimal_partition(y, 2);
  EXPECT_EQ(r[2].cps.taus(), (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(r[2].cost, 0.0);
}
