#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpcv/error.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

/// Interleaved holdout folds F_v = {v + i V : i >= 0, v + i V <= n}, v = 1..V,
/// with their sorted complements. All indices are 1-based.
struct FoldPlan {
  std::size_t n = 0;
  std::size_t v = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::vector<std::vector<std::size_t>> complements;
};

inline FoldPlan make_fold_plan(std::size_t n, std::size_t v) {
  if (v < 2 || 2 * v > n) {
    throw error(errc::bad_fold_count,
                "need 2 <= V <= n/2, got V = " + std::to_string(v) + " for n = " + std::to_string(n));
  }
  FoldPlan plan{n, v, std::vector<std::vector<std::size_t>>(v), std::vector<std::vector<std::size_t>>(v)};
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t f = (i - 1) % v;
    plan.folds[f].push_back(i);
    for (std::size_t g = 0; g < v; ++g) {
      if (g != f) plan.complements[g].push_back(i);
    }
  }
  return plan;
}

/// Maps change-points estimated on the training subsequence (scale m) back to
/// the full grid: tau~ -> complement[tau~] (1-based lookup).
inline ChangePointSet remap_changepoints(const ChangePointSet& train_cps, std::span<const std::size_t> complement,
                                         std::size_t n) {
  if (train_cps.n() != complement.size()) {
    throw error(errc::inconsistent_scales, "training scale " + std::to_string(train_cps.n()) +
                                               " differs from complement size " + std::to_string(complement.size()));
  }
  std::vector<std::size_t> out;
  out.reserve(train_cps.size());
  for (auto t : train_cps.taus()) out.push_back(complement[t - 1]);
  return ChangePointSet(n, std::move(out));
}

/// Removes the final design point when n is odd.
inline Series drop_to_even(const Series& series) {
  return series.n() % 2 == 0 ? series : series.head(series.n() - 1);
}

/// Rows at 1-based positions, in order.
inline Series restrict_to(const Series& series, std::span<const std::size_t> positions) {
  std::vector<std::size_t> rows;
  rows.reserve(positions.size());
  for (auto p : positions) rows.push_back(p - 1);
  return series.take(rows);
}

/// Odd-indexed (Y^O) and even-indexed (Y^E) subsequences of an even-length series.
inline std::pair<Series, Series> odd_even_split(const Series& series) {
  if (series.n() % 2 != 0) throw error(errc::odd_length, "odd/even split needs even n");
  std::vector<std::size_t> odd, even;
  for (std::size_t i = 0; i < series.n(); i += 2) {
    odd.push_back(i);
    even.push_back(i + 1);
  }
  return {series.take(odd), series.take(even)};
}

}  // namespace cpcv
