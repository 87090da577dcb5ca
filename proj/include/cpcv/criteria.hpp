#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpcv/error.hpp"
#include "cpcv/folds.hpp"
#include "cpcv/segmentation.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

enum class Criterion { cv2, cv1, cvmod, cv1_vfold, cvmod_vfold };

constexpr std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::cv2: return "CV2";
    case Criterion::cv1: return "CV1";
    case Criterion::cvmod: return "CVmod";
    case Criterion::cv1_vfold: return "CV1-vfold";
    case Criterion::cvmod_vfold: return "CVmod-vfold";
  }
  return "unknown";
}

inline constexpr double infeasible = std::numeric_limits<double>::infinity();

/// Criterion value per tuning parameter (number of change-points L or psi).
/// Infeasible parameters carry +infinity.
struct CriterionCurve {
  Criterion method = Criterion::cv2;
  std::vector<std::size_t> params;
  std::vector<double> values;

  std::size_t k_max() const { return params.empty() ? 0 : params.back(); }
};

namespace detail {

inline double squared_distance(std::span<const double> y, const Vector& level) {
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double r = y[j] - level[j];
    s += r * r;
  }
  return s;
}

inline double distance(std::span<const double> y, const Vector& level) {
  if (y.size() == 1) return std::abs(y[0] - level[0]);
  return std::sqrt(squared_distance(y, level));
}

// One pass of the two-fold criterion: segments fitted on `fit` predict the
// same half-scale indices of `hold`. With `skip_last`, the final index of
// each segment is dropped (odd pass of CVmod); with `skip_first`, the first
// (even pass). Dropping rescales the segment sum by len / (len - 1).
inline double two_fold_pass(const Series& fit, const Series& hold, const ChangePointSet& cps, Criterion c,
                            bool skip_first, bool skip_last) {
  const auto b = cps.boundaries();
  const auto means = segment_means(fit, cps);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    const std::size_t len = b[k + 1] - b[k];
    std::size_t first = b[k], last = b[k + 1];
    if (c == Criterion::cvmod) {
      if (len < 2) return infeasible;
      if (skip_first) ++first;
      if (skip_last) --last;
    }
    double seg = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      seg += c == Criterion::cv1 ? distance(hold.row(i), means[k]) : squared_distance(hold.row(i), means[k]);
    }
    if (c == Criterion::cvmod) seg *= static_cast<double>(len) / static_cast<double>(len - 1);
    total += seg;
  }
  return total;
}

inline void check_two_fold(const Series& series, std::size_t l) {
  if (series.n() % 2 != 0) throw error(errc::odd_length, "two-fold criteria need even n (use drop_to_even)");
  if (l >= series.n() / 2) {
    throw error(errc::l_infeasible,
                "L = " + std::to_string(l) + " needs more than " + std::to_string(series.n() / 2) + " points per half");
  }
}

}  // namespace detail

/// Two-fold (odd/even) criterion value for a given pair of fitted segmentations.
inline double two_fold_value(const Series& odd, const Series& even, const ChangePointSet& fit_odd,
                             const ChangePointSet& fit_even, Criterion c) {
  if (c != Criterion::cv2 && c != Criterion::cv1 && c != Criterion::cvmod) {
    throw error(errc::bad_params, "not a two-fold criterion");
  }
  const double a = detail::two_fold_pass(odd, even, fit_odd, c, false, true);
  if (std::isinf(a)) return infeasible;
  const double b = detail::two_fold_pass(even, odd, fit_even, c, true, false);
  if (std::isinf(b)) return infeasible;
  return a + b;
}

/// Criterion curve over L = 0..k_max for CV2 (COPPS), CV1 or CVmod. One
/// optimal-partitioning run per half serves every L.
inline CriterionCurve two_fold_curve(const Series& series, Criterion c, std::size_t k_max) {
  detail::check_two_fold(series, k_max);
  const auto [odd, even] = odd_even_split(series.anchored());
  const auto fit_odd = optimal_partition(odd, k_max);
  const auto fit_even = optimal_partition(even, k_max);
  CriterionCurve curve{c, {}, {}};
  for (std::size_t l = 0; l <= k_max; ++l) {
    curve.params.push_back(l);
    curve.values.push_back(two_fold_value(odd, even, fit_odd[l].cps, fit_even[l].cps, c));
  }
  return curve;
}

namespace detail {
inline double two_fold_at(const Series& series, std::size_t l, Criterion c) {
  check_two_fold(series, l);
  const auto [odd, even] = odd_even_split(series.anchored());
  return two_fold_value(odd, even, optimal_partition(odd, l)[l].cps, optimal_partition(even, l)[l].cps, c);
}
}  // namespace detail

/// Squared-error two-fold criterion (the COPPS criterion).
inline double cv2(const Series& series, std::size_t l) { return detail::two_fold_at(series, l, Criterion::cv2); }

/// Absolute-error two-fold criterion; Euclidean norm of the residual for d > 1.
inline double cv1(const Series& series, std::size_t l) { return detail::two_fold_at(series, l, Criterion::cv1); }

/// Modified squared-error criterion. Drops the holdout point at the last
/// index of each odd-fit segment and the first index of each even-fit
/// segment; +infinity when some fitted segment is shorter than 2.
inline double cvmod(const Series& series, std::size_t l) { return detail::two_fold_at(series, l, Criterion::cvmod); }

// ---------------------------------------------------------------------------
// Generalised V-fold criteria

/// Output of a segmentation procedure on a training subsequence: change-points
/// on the training scale and one level per segment.
struct FittedModel {
  ChangePointSet cps;
  std::vector<Vector> levels;
};

/// Optimal partitioning with psi = number of change-points; levels are the
/// training segment means.
struct OptimalPartitionFitter {
  std::vector<FittedModel> operator()(const Series& train, std::span<const std::size_t> grid) const {
    std::size_t top = 0;
    for (auto p : grid) top = std::max(top, p);
    const auto fit = optimal_partition(train, top);
    std::vector<FittedModel> out;
    out.reserve(grid.size());
    for (auto p : grid) out.push_back({fit[p].cps, segment_means(train, fit[p].cps)});
    return out;
  }
};

enum class VfoldLoss { abs, modsq };

/// V-fold criterion over `psi_grid`. For each fold v the fitter runs on the
/// complement, its change-points are remapped to the full grid, and every
/// held-out Y_i is predicted by the level of the remapped segment containing i.
///
/// abs:   sum ||Y_i - beta||_2
/// modsq: sum over i in F_v with tau_k + 1 < i <= tau_{k+1} of
///        (tau_{k+1} - tau_k) / (tau_{k+1} - tau_k - 1) ||Y_i - beta||^2;
///        +infinity for psi where any remapped segment is shorter than 2(V - 1).
template <class Fitter>
CriterionCurve vfold_criterion(const Series& series, const FoldPlan& plan, std::span<const std::size_t> psi_grid,
                               Fitter&& fitter, VfoldLoss loss) {
  if (psi_grid.empty()) throw error(errc::bad_grid, "empty tuning-parameter grid");
  if (plan.n != series.n()) throw error(errc::length_mismatch, "fold plan and series differ in n");
  const Series y = series.anchored();
  const std::size_t n = y.n();
  const std::size_t min_len = 2 * (plan.v - 1);

  CriterionCurve curve{loss == VfoldLoss::abs ? Criterion::cv1_vfold : Criterion::cvmod_vfold,
                       std::vector<std::size_t>(psi_grid.begin(), psi_grid.end()),
                       std::vector<double>(psi_grid.size(), 0.0)};

  for (std::size_t v = 0; v < plan.v; ++v) {
    const auto& complement = plan.complements[v];
    const auto& fold = plan.folds[v];
    const Series train = restrict_to(y, complement);
    const std::vector<FittedModel> models = fitter(train, psi_grid);
    if (models.size() != psi_grid.size()) throw error(errc::bad_params, "fitter returned wrong number of models");

    for (std::size_t g = 0; g < psi_grid.size(); ++g) {
      if (std::isinf(curve.values[g])) continue;
      const auto& model = models[g];
      if (model.levels.size() != model.cps.size() + 1) {
        throw error(errc::bad_params, "fitter returned mismatched levels");
      }
      const auto b = remap_changepoints(model.cps, complement, n).boundaries();

      if (loss == VfoldLoss::modsq) {
        bool ok = true;
        for (std::size_t k = 0; k + 1 < b.size(); ++k) ok = ok && b[k + 1] - b[k] >= min_len;
        if (!ok) {
          curve.values[g] = infeasible;
          continue;
        }
      }

      double total = 0.0;
      std::size_t k = 0;
      for (auto i : fold) {
        while (i > b[k + 1]) ++k;  // remapped segments tile (0, n]
        const auto row = y.row(i - 1);
        if (loss == VfoldLoss::abs) {
          total += detail::distance(row, model.levels[k]);
        } else if (i > b[k] + 1) {
          const double len = static_cast<double>(b[k + 1] - b[k]);
          total += len / (len - 1.0) * detail::squared_distance(row, model.levels[k]);
        }
      }
      curve.values[g] += total;
    }
  }
  return curve;
}

/// Index of the minimising parameter; ties go to the smallest parameter.
inline std::size_t select_k(const CriterionCurve& curve) {
  std::size_t best = curve.values.size();
  for (std::size_t g = 0; g < curve.values.size(); ++g) {
    const double v = curve.values[g];
    if (std::isnan(v) || std::isinf(v)) continue;
    if (best == curve.values.size() || v < curve.values[best] ||
        (v == curve.values[best] && curve.params[g] < curve.params[best])) {
      best = g;
    }
  }
  if (best == curve.values.size()) throw error(errc::all_infeasible, "no finite criterion value");
  return curve.params[best];
}

}  // namespace cpcv
