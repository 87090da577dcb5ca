#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "cpcv/criteria.hpp"
#include "cpcv/error.hpp"
#include "cpcv/folds.hpp"
#include "cpcv/segmentation.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

enum class Method { copps, cv1, cvmod, cv1_vfold, cvmod_vfold };

/// A tuning-parameter selection rule for optimal partitioning.
struct Estimator {
  Method method = Method::cv1_vfold;
  std::size_t folds = 5;  // V-fold methods only

  bool is_vfold() const noexcept { return method == Method::cv1_vfold || method == Method::cvmod_vfold; }

  /// Display name: COPPS, CV1, CVmod, 5-fold CV1, ...
  std::string name() const {
    switch (method) {
      case Method::copps: return "COPPS";
      case Method::cv1: return "CV1";
      case Method::cvmod: return "CVmod";
      case Method::cv1_vfold: return std::to_string(folds) + "-fold CV1";
      case Method::cvmod_vfold: return std::to_string(folds) + "-fold CVmod";
    }
    return "unknown";
  }

  /// Parses copps | cv1 | cvmod | cv1-vfold[:V] | cvmod-vfold[:V].
  static Estimator parse(std::string_view text, std::size_t default_folds = 5) {
    std::string_view head = text;
    std::size_t folds = default_folds;
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
      head = text.substr(0, colon);
      auto tail = text.substr(colon + 1);
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), folds);
      if (ec != std::errc{} || ptr != tail.data() + tail.size()) {
        throw error(errc::parse_error, "bad fold count in '" + std::string(text) + "'");
      }
    }
    if (head == "copps") return {Method::copps, folds};
    if (head == "cv1") return {Method::cv1, folds};
    if (head == "cvmod") return {Method::cvmod, folds};
    if (head == "cv1-vfold") return {Method::cv1_vfold, folds};
    if (head == "cvmod-vfold") return {Method::cvmod_vfold, folds};
    throw error(errc::parse_error, "unknown method '" + std::string(text) + "'");
  }
};

struct FitResult {
  std::size_t k_hat = 0;
  ChangePointSet final_cps;
  PiecewiseSignal f_hat;
  CriterionCurve curve;
};

/// Criterion curve over L = 0..k_max. Two-fold methods run on the series with
/// its last point dropped when n is odd.
inline CriterionCurve criterion_curve(const Series& series, const Estimator& est, std::size_t k_max) {
  if (series.n() < 2) throw error(errc::series_too_short, "need at least 2 observations");
  if (!est.is_vfold()) {
    const Series even = drop_to_even(series);
    if (even.n() < 2 * (k_max + 1)) {
      throw error(errc::series_too_short, "two-fold selection with k_max = " + std::to_string(k_max) +
                                              " needs n >= " + std::to_string(2 * (k_max + 1)));
    }
    const Criterion c = est.method == Method::copps ? Criterion::cv2
                        : est.method == Method::cv1 ? Criterion::cv1
                                                    : Criterion::cvmod;
    return two_fold_curve(even, c, k_max);
  }
  const FoldPlan plan = make_fold_plan(series.n(), est.folds);
  for (const auto& c : plan.complements) {
    if (c.size() < k_max + 1) {
      throw error(errc::series_too_short, std::to_string(est.folds) + "-fold selection with k_max = " +
                                              std::to_string(k_max) + " needs longer training sets");
    }
  }
  std::vector<std::size_t> grid(k_max + 1);
  std::iota(grid.begin(), grid.end(), std::size_t{0});
  return vfold_criterion(series, plan, grid, OptimalPartitionFitter{},
                         est.method == Method::cv1_vfold ? VfoldLoss::abs : VfoldLoss::modsq);
}

/// Selects K-hat with the given rule, refits optimal partitioning on the full
/// series with L = K-hat and returns the fitted step function of segment means.
inline FitResult run_estimator(const Series& series, const Estimator& est, std::size_t k_max) {
  FitResult out;
  out.curve = criterion_curve(series, est, k_max);
  out.k_hat = select_k(out.curve);
  out.final_cps = optimal_partition(series, out.k_hat)[out.k_hat].cps;
  out.f_hat = PiecewiseSignal::fitted(out.final_cps, segment_means(series, out.final_cps));
  return out;
}

/// Integrated squared error of two step functions on [0, 1] with steps on
/// the grid i/n; exact, summed over the merged breakpoints.
inline double mise(const PiecewiseSignal& f_hat, const PiecewiseSignal& f_true) {
  if (f_hat.n() != f_true.n() || f_hat.d() != f_true.d()) {
    throw error(errc::length_mismatch, "signals differ in length or dimension");
  }
  const auto a = f_hat.cps().boundaries();
  const auto b = f_true.cps().boundaries();
  std::size_t ia = 0, ib = 0, pos = 0;
  double total = 0.0;
  while (pos < f_hat.n()) {
    const std::size_t next = std::min(a[ia + 1], b[ib + 1]);
    total += static_cast<double>(next - pos) * detail::squared_distance(f_hat.levels()[ia], f_true.levels()[ib]);
    pos = next;
    if (a[ia + 1] == pos) ++ia;
    if (b[ib + 1] == pos) ++ib;
  }
  return total / static_cast<double>(f_hat.n());
}

}  // namespace cpcv
