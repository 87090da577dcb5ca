#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cpcv/io.hpp"
#include "cpcv/signal.hpp"
#include "cpcv/simulate.hpp"

using namespace cpcv;

namespace {

std::vector<double> flatten(const Series& s) { return {s.data().begin(), s.data().end()}; }

}  // namespace

TEST(Signal, SingleStep) {
  auto sig = make_signal(ChangePointSet(6, {3}), std::vector<double>{0, 5});
  EXPECT_EQ(flatten(sig.to_series()), (std::vector<double>{0, 0, 0, 5, 5, 5}));
  EXPECT_EQ(evaluate_mean(sig, 3), Vector{0});
  EXPECT_EQ(evaluate_mean(sig, 4), Vector{5});
}

TEST(Signal, Constant) {
  auto sig = make_signal(ChangePointSet(4, {}), std::vector<double>{2});
  EXPECT_EQ(flatten(sig.to_series()), (std::vector<double>{2, 2, 2, 2}));
}

TEST(Signal, LargerExampleIsValid) {
  auto s = scenario_larger(false);
  EXPECT_EQ(s.signal.n(), 2048u);
  EXPECT_EQ(s.signal.cps().size(), 11u);
  EXPECT_EQ(s.signal.levels().front(), Vector{-2.32});
}

TEST(Signal, BlocksFirstJump) {
  auto sig = blocks_signal();
  EXPECT_EQ(evaluate_mean(sig, 205), Vector{0});
  EXPECT_EQ(evaluate_mean(sig, 206), Vector{14.64});
}

TEST(Signal, IndexOutOfRange) {
  auto sig = make_signal(ChangePointSet(6, {3}), std::vector<double>{0, 5});
  for (std::size_t i : {std::size_t{0}, std::size_t{7}}) {
    try {
      evaluate_mean(sig, i);
      FAIL() << "expected IndexOutOfRange";
    } catch (const error& e) {
      EXPECT_EQ(e.code(), errc::index_out_of_range);
    }
  }
}

TEST(Signal, RejectsEqualAdjacentLevels) {
  try {
    make_signal(ChangePointSet(6, {2, 4}), std::vector<double>{1, 1, 2});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::adjacent_levels_equal);
  }
  // Non-adjacent repeats are fine.
  EXPECT_NO_THROW(make_signal(ChangePointSet(6, {2, 4}), std::vector<double>{1, 2, 1}));
}

TEST(Signal, RejectsBadChangePoints) {
  for (auto taus : {std::vector<std::size_t>{3, 3}, {4, 2}, {0}, {6}}) {
    try {
      ChangePointSet(6, taus);
      FAIL();
    } catch (const error& e) {
      EXPECT_EQ(e.code(), errc::bad_change_points);
    }
  }
}

TEST(Signal, LevelCountMustMatch) {
  EXPECT_THROW(make_signal(ChangePointSet(6, {3}), std::vector<double>{1}), error);
}

TEST(Signal, MultivariateLevels) {
  auto sig = make_signal(ChangePointSet(4, {1}), std::vector<Vector>{{0, 1}, {0, 2}});
  EXPECT_EQ(sig.d(), 2u);
  EXPECT_EQ(evaluate_mean(sig, 2), (Vector{0, 2}));
  ASSERT_EQ(sig.jumps().size(), 1u);
  EXPECT_DOUBLE_EQ(sig.jumps()[0], 1.0);
}

// Step-function and round-trip properties over random signals.
TEST(Signal, ChangePositionsRoundTrip) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<std::size_t> taus;
    for (std::size_t i = 1; i < n; ++i) {
      if (rng() % 5 == 0) taus.push_back(i);
    }
    std::vector<double> levels;
    double l = 0.0;
    for (std::size_t k = 0; k <= taus.size(); ++k) {
      levels.push_back(l);
      l += 1.0 + static_cast<double>(rng() % 3);
    }
    auto sig = make_signal(ChangePointSet(n, taus), levels);
    const Series mu = sig.to_series();
    EXPECT_EQ(change_positions(mu), taus);
    for (std::size_t i = 1; i < n; ++i) {
      const bool jumps = evaluate_mean(sig, i) != evaluate_mean(sig, i + 1);
      const bool is_tau = std::find(taus.begin(), taus.end(), i) != taus.end();
      EXPECT_EQ(jumps, is_tau);
    }
  }
}

TEST(Series, RejectsNonFinite) {
  EXPECT_THROW(Series::univariate({1.0, std::nan("")}), error);
  EXPECT_THROW(Series(2, 2, {1, 2, 3}), error);
}

TEST(Series, AnchoredSubtractsFirstRow) {
  auto s = Series(3, 2, {1, 10, 2, 20, 4, 40});
  EXPECT_EQ(flatten(s.anchored()), (std::vector<double>{0, 0, 1, 10, 3, 30}));
}

TEST(SeriesCsv, ReadsColumnsAndHeader) {
  std::istringstream in("y1,y2\n1,2\n3, 4\r\n\n5,6\n");
  auto s = read_series_csv(in, true);
  EXPECT_EQ(s.n(), 3u);
  EXPECT_EQ(s.d(), 2u);
  EXPECT_EQ(s(1, 1), 4.0);
}

TEST(SeriesCsv, ParseErrors) {
  auto code = [](const std::string& text, bool header) {
    std::istringstream in(text);
    try {
      read_series_csv(in, header);
    } catch (const error& e) {
      return e.code();
    }
    return errc::bad_params;
  };
  EXPECT_EQ(code("1\nx\n", false), errc::parse_error);
  EXPECT_EQ(code("1,2\n3\n", false), errc::parse_error);
  EXPECT_EQ(code("y\n1\n2\n", false), errc::parse_error);  // header without --header
  EXPECT_EQ(code("", false), errc::parse_error);
  EXPECT_EQ(code("1\n", false), errc::bad_series);
}

TEST(SeriesCsv, WriteThenRead) {
  auto s = Series(3, 2, {0.1, -2.5e-7, 3, 4, 1e10, 6});
  std::stringstream io;
  write_series_csv(io, s);
  EXPECT_EQ(read_series_csv(io), s);
}
