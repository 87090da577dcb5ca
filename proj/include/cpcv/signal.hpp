#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpcv/error.hpp"

namespace cpcv {

/// Dense real vector; d = 1 is the univariate case.
using Vector = std::vector<double>;

/// Observation matrix Y with n design points and d coordinates, stored row-major.
///
/// Rows are addressed 0-based internally; every public interface that talks
/// about design positions (change-points, CLI, files) is 1-based.
class Series {
 public:
  Series() = default;

  Series(std::size_t n, std::size_t d, std::vector<double> data)
      : n_(n), d_(d), data_(std::move(data)) {
    if (n_ == 0 || d_ == 0) {
      throw error(errc::bad_series, "series needs n >= 1 and d >= 1");
    }
    if (data_.size() != n_ * d_) {
      throw error(errc::bad_series, "data size does not match n * d");
    }
    for (double v : data_) {
      if (!std::isfinite(v)) {
        throw error(errc::bad_series, "series contains a non-finite value");
      }
    }
  }

  static Series univariate(std::vector<double> values) {
    const auto n = values.size();
    return Series(n, 1, std::move(values));
  }

  static Series from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw error(errc::bad_series, "no rows");
    const auto d = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw error(errc::bad_series, "ragged rows");
      data.insert(data.end(), r.begin(), r.end());
    }
    return Series(rows.size(), d, std::move(data));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * d_, d_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * d_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  /// Rows at the given 0-based indices, in the given order.
  Series take(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * d_);
    for (auto i : rows) {
      auto r = row(i);
      out.insert(out.end(), r.begin(), r.end());
    }
    return Series(rows.size(), d_, std::move(out));
  }

  /// First `m` rows.
  Series head(std::size_t m) const {
    return Series(m, d_, std::vector<double>(data_.begin(), data_.begin() + m * d_));
  }

  /// Every row minus the first row. Exact when the shift that produced the
  /// data was exact, so downstream arithmetic sees bit-identical input.
  Series anchored() const {
    std::vector<double> out(data_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) out[i * d_ + j] = data_[i * d_ + j] - data_[j];
    }
    return Series(n_, d_, std::move(out));
  }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Interior change-points 0 < tau_1 < ... < tau_L < n on the design grid 1..n.
///
/// Segment k covers the 1-based positions (tau_k, tau_{k+1}], which is the
/// 0-based half-open range [tau_k, tau_{k+1}).
class ChangePointSet {
 public:
  ChangePointSet() = default;

  ChangePointSet(std::size_t n, std::vector<std::size_t> taus) : n_(n), taus_(std::move(taus)) {
    if (n_ == 0) throw error(errc::bad_change_points, "n must be positive");
    std::size_t prev = 0;
    for (auto t : taus_) {
      if (t <= prev || t >= n_) {
        throw error(errc::bad_change_points,
                    "change-points must be strictly increasing and inside (0, n)");
      }
      prev = t;
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return taus_.size(); }
  const std::vector<std::size_t>& taus() const noexcept { return taus_; }

  /// tau_0 = 0, tau_1..tau_L, tau_{L+1} = n.
  std::vector<std::size_t> boundaries() const {
    std::vector<std::size_t> b;
    b.reserve(taus_.size() + 2);
    b.push_back(0);
    b.insert(b.end(), taus_.begin(), taus_.end());
    b.push_back(n_);
    return b;
  }

  friend bool operator==(const ChangePointSet&, const ChangePointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> taus_;
};

/// Piecewise-constant mean function: mu_i = beta_k iff tau_k < i <= tau_{k+1}.
class PiecewiseSignal {
 public:
  PiecewiseSignal() = default;

  const ChangePointSet& cps() const noexcept { return cps_; }
  const std::vector<Vector>& levels() const noexcept { return levels_; }
  std::size_t n() const noexcept { return cps_.n(); }
  std::size_t d() const noexcept { return levels_.empty() ? 0 : levels_.front().size(); }

  /// Level of the segment containing 1-based position i.
  const Vector& at(std::size_t i) const {
    if (i < 1 || i > n()) throw error(errc::index_out_of_range, "position outside 1..n");
    const auto& t = cps_.taus();
    auto k = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), i) - t.begin());
    return levels_[k];
  }

  /// Mean vector mu_1..mu_n as a series.
  Series to_series() const {
    std::vector<double> out;
    out.reserve(n() * d());
    const auto b = cps_.boundaries();
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
      for (auto i = b[k]; i < b[k + 1]; ++i) out.insert(out.end(), levels_[k].begin(), levels_[k].end());
    }
    return Series(n(), d(), std::move(out));
  }

  /// Jump sizes ||beta_k - beta_{k-1}||, k = 1..K.
  std::vector<double> jumps() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < levels_.size(); ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < d(); ++j) {
        const double diff = levels_[k][j] - levels_[k - 1][j];
        s += diff * diff;
      }
      out.push_back(std::sqrt(s));
    }
    return out;
  }

  /// Builds a fitted step function. Adjacent levels may coincide, which
  /// happens for estimates on degenerate data.
  static PiecewiseSignal fitted(ChangePointSet cps, std::vector<Vector> levels) {
    check_shape(cps, levels);
    return PiecewiseSignal(std::move(cps), std::move(levels));
  }

  friend PiecewiseSignal make_signal(ChangePointSet cps, std::vector<Vector> levels);

 private:
  PiecewiseSignal(ChangePointSet cps, std::vector<Vector> levels)
      : cps_(std::move(cps)), levels_(std::move(levels)) {}

  static void check_shape(const ChangePointSet& cps, const std::vector<Vector>& levels) {
    if (levels.size() != cps.size() + 1) {
      throw error(errc::bad_params, "need exactly one level per segment");
    }
    const auto d = levels.front().size();
    if (d == 0) throw error(errc::bad_params, "levels must have dimension >= 1");
    for (const auto& l : levels) {
      if (l.size() != d) throw error(errc::bad_params, "levels have mixed dimensions");
      for (double v : l) {
        if (!std::isfinite(v)) throw error(errc::bad_params, "non-finite level");
      }
    }
  }

  ChangePointSet cps_;
  std::vector<Vector> levels_;
};

/// Validated constructor: every change-point must be a genuine change.
inline PiecewiseSignal make_signal(ChangePointSet cps, std::vector<Vector> levels) {
  PiecewiseSignal::check_shape(cps, levels);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k] == levels[k - 1]) {
      throw error(errc::adjacent_levels_equal,
                  "levels " + std::to_string(k - 1) + " and " + std::to_string(k) + " are equal");
    }
  }
  return PiecewiseSignal(std::move(cps), std::move(levels));
}

/// Univariate convenience overload.
inline PiecewiseSignal make_signal(ChangePointSet cps, const std::vector<double>& levels) {
  std::vector<Vector> lv;
  lv.reserve(levels.size());
  for (double v : levels) lv.push_back(Vector{v});
  return make_signal(std::move(cps), std::move(lv));
}

inline const Vector& evaluate_mean(const PiecewiseSignal& signal, std::size_t i) {
  return signal.at(i);
}

/// Per-segment sample means of `series` over the segments of `cps`.
inline std::vector<Vector> segment_means(const Series& series, const ChangePointSet& cps) {
  if (series.n() != cps.n()) throw error(errc::length_mismatch, "series and change-points differ in n");
  const auto b = cps.boundaries();
  std::vector<Vector> out;
  out.reserve(b.size() - 1);
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    Vector mean(series.d(), 0.0);
    for (auto i = b[k]; i < b[k + 1]; ++i) {
      auto r = series.row(i);
      for (std::size_t j = 0; j < series.d(); ++j) mean[j] += r[j];
    }
    const double len = static_cast<double>(b[k + 1] - b[k]);
    for (auto& m : mean) m /= len;
    out.push_back(std::move(mean));
  }
  return out;
}

/// Positions i (1-based) with mu_{i+1} != mu_i.
inline std::vector<std::size_t> change_positions(const Series& mu) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < mu.n(); ++i) {
    auto a = mu.row(i);
    auto b = mu.row(i + 1);
    if (!std::equal(a.begin(), a.end(), b.begin())) out.push_back(i + 1);
  }
  return out;
}

}  // namespace cpcv
