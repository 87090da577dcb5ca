#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cpcv/error.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

/// Prefix sums of Y and ||Y||^2 giving the residual sum of squares of any
/// segment (a, b] in O(d).
///
/// The series is anchored at its first row before accumulation and the sums
/// are Neumaier-compensated; both reduce cancellation in
/// sum ||y||^2 - ||sum y||^2 / m.
class SegmentCostTable {
 public:
  explicit SegmentCostTable(const Series& series)
      : n_(series.n()), d_(series.d()), sum_(d_ * (n_ + 1), 0.0), sumsq_(n_ + 1, 0.0), inv_len_(n_ + 1, 0.0) {
    std::vector<double> acc(d_, 0.0), comp(d_, 0.0);
    double acc_sq = 0.0, comp_sq = 0.0;
    const auto anchor = series.row(0);
    for (std::size_t i = 0; i < n_; ++i) {
      auto r = series.row(i);
      double sq = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        const double y = r[j] - anchor[j];
        neumaier_add(acc[j], comp[j], y);
        sum_[j * (n_ + 1) + i + 1] = acc[j] + comp[j];
        sq += y * y;
      }
      neumaier_add(acc_sq, comp_sq, sq);
      sumsq_[i + 1] = acc_sq + comp_sq;
    }
    for (std::size_t m = 1; m <= n_; ++m) inv_len_[m] = 1.0 / static_cast<double>(m);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }

  /// Residual sum of squares of 0-based rows [a, b), i.e. positions (a, b].
  double cost(std::size_t a, std::size_t b) const noexcept {
    double between = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double* s = sum_.data() + j * (n_ + 1);
      const double diff = s[b] - s[a];
      between += diff * diff;
    }
    const double c = sumsq_[b] - sumsq_[a] - between * inv_len_[b - a];
    return c < 0.0 ? 0.0 : c;
  }

  /// Cumulative sum of coordinate j over the first i anchored rows.
  double prefix_sum(std::size_t i, std::size_t j) const noexcept { return sum_[j * (n_ + 1) + i]; }
  const double* prefix_sums(std::size_t j) const noexcept { return sum_.data() + j * (n_ + 1); }
  double prefix_sumsq(std::size_t i) const noexcept { return sumsq_[i]; }
  double inv_length(std::size_t m) const noexcept { return inv_len_[m]; }

 private:
  static void neumaier_add(double& sum, double& comp, double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  std::size_t n_;
  std::size_t d_;
  std::vector<double> sum_;  // column-major, (n + 1) per coordinate
  std::vector<double> sumsq_;
  std::vector<double> inv_len_;
};

inline SegmentCostTable build_cost_table(const Series& series) { return SegmentCostTable(series); }

struct Segmentation {
  ChangePointSet cps;
  double cost = 0.0;
};

/// Optimal segmentations for every L = 0..l_max.
class SegmentationResult {
 public:
  SegmentationResult() = default;
  explicit SegmentationResult(std::vector<Segmentation> per_l) : per_l_(std::move(per_l)) {}

  std::size_t l_max() const noexcept { return per_l_.size() - 1; }
  const Segmentation& operator[](std::size_t l) const { return per_l_.at(l); }
  const std::vector<Segmentation>& all() const noexcept { return per_l_; }

 private:
  std::vector<Segmentation> per_l_;
};

namespace detail {

// Layer l of the backward recursion:
//   best[s] = min_{s < t <= n - l} cost(s, t) + next[t]
// Candidates are scanned in increasing t and replaced only on strict
// improvement, so the smallest optimal t is kept.
inline void partition_layer(const SegmentCostTable& table, std::size_t l, const std::vector<double>& next,
                            std::vector<double>& best, std::vector<std::size_t>& arg) {
  const std::size_t n = table.n();
  const std::size_t last_t = n - l;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::fill(best.begin(), best.end(), inf);
  if (table.d() == 1) {
    // Hot path: scalar series.
    const double* s1 = table.prefix_sums(0);
    for (std::size_t s = 0; s < last_t; ++s) {
      const double ss0 = table.prefix_sumsq(s);
      const double s0 = s1[s];
      double b = inf;
      std::size_t a = s + 1;
      for (std::size_t t = s + 1; t <= last_t; ++t) {
        const double diff = s1[t] - s0;
        double c = table.prefix_sumsq(t) - ss0 - diff * diff * table.inv_length(t - s);
        c = c < 0.0 ? 0.0 : c;
        const double v = c + next[t];
        if (v < b) {
          b = v;
          a = t;
        }
      }
      best[s] = b;
      arg[s] = a;
    }
    return;
  }
  for (std::size_t s = 0; s < last_t; ++s) {
    double b = inf;
    std::size_t a = s + 1;
    for (std::size_t t = s + 1; t <= last_t; ++t) {
      const double v = table.cost(s, t) + next[t];
      if (v < b) {
        b = v;
        a = t;
      }
    }
    best[s] = b;
    arg[s] = a;
  }
}

}  // namespace detail

/// Least-squares segmentation with exactly L interior change-points, for all
/// L = 0..l_max in one dynamic program. O(l_max n^2) time, O(l_max n) memory.
///
/// Ties resolve to the lexicographically smallest change-point vector.
inline SegmentationResult optimal_partition(const Series& series, std::size_t l_max) {
  const std::size_t n = series.n();
  if (l_max >= n) {
    throw error(errc::l_max_too_large,
                "l_max = " + std::to_string(l_max) + " needs at least l_max + 1 points, have " + std::to_string(n));
  }
  const SegmentCostTable table(series);

  // tail[s]: optimal cost of (s, n] with the current number of change-points.
  std::vector<double> tail(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < n; ++s) tail[s] = table.cost(s, n);

  std::vector<std::vector<std::size_t>> arg(l_max + 1);
  std::vector<double> total(l_max + 1);
  total[0] = tail[0];
  std::vector<double> layer(n + 1);
  for (std::size_t l = 1; l <= l_max; ++l) {
    arg[l].assign(n + 1, 0);
    detail::partition_layer(table, l, tail, layer, arg[l]);
    std::swap(tail, layer);
    total[l] = tail[0];
  }

  std::vector<Segmentation> per_l;
  per_l.reserve(l_max + 1);
  for (std::size_t l = 0; l <= l_max; ++l) {
    std::vector<std::size_t> taus;
    taus.reserve(l);
    std::size_t s = 0;
    for (std::size_t k = l; k >= 1; --k) {
      s = arg[k][s];
      taus.push_back(s);
    }
    per_l.push_back({ChangePointSet(n, std::move(taus)), total[l]});
  }
  return SegmentationResult(std::move(per_l));
}

/// Exhaustive search over all C(n-1, L) placements; test oracle for
/// `optimal_partition`. Same tie rule (first minimum in lexicographic order).
inline Segmentation brute_force_partition(const Series& series, std::size_t l) {
  const std::size_t n = series.n();
  if (n > 20) throw error(errc::too_large_for_oracle, "brute force limited to n <= 20");
  if (l >= n) throw error(errc::l_max_too_large, "need L < n");
  const SegmentCostTable table(series);

  std::vector<std::size_t> c(l);
  for (std::size_t k = 0; k < l; ++k) c[k] = k + 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_c;
  while (true) {
    // Right-nested sum: cost(0, c1) + (cost(c1, c2) + (... + cost(cL, n))).
    double acc = table.cost(l == 0 ? 0 : c[l - 1], n);
    for (std::size_t k = l; k-- > 0;) {
      const std::size_t a = k == 0 ? 0 : c[k - 1];
      acc = table.cost(a, c[k]) + acc;
    }
    if (acc < best) {
      best = acc;
      best_c = c;
    }
    // Next combination in lexicographic order.
    std::size_t k = l;
    while (k > 0 && c[k - 1] == n - 1 - (l - k)) --k;
    if (k == 0) break;
    ++c[k - 1];
    for (std::size_t j = k; j < l; ++j) c[j] = c[j - 1] + 1;
  }
  return {ChangePointSet(n, std::move(best_c)), best};
}

}  // namespace cpcv
