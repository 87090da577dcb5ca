#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpcv {

enum class errc {
  bad_change_points,
  adjacent_levels_equal,
  index_out_of_range,
  bad_series,
  l_max_too_large,
  too_large_for_oracle,
  bad_fold_count,
  inconsistent_scales,
  odd_length,
  l_infeasible,
  bad_grid,
  all_infeasible,
  series_too_short,
  length_mismatch,
  bad_params,
  parse_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::bad_change_points: return "BadChangePoints";
    case errc::adjacent_levels_equal: return "AdjacentLevelsEqual";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::bad_series: return "BadSeries";
    case errc::l_max_too_large: return "LMaxTooLarge";
    case errc::too_large_for_oracle: return "TooLargeForOracle";
    case errc::bad_fold_count: return "BadFoldCount";
    case errc::inconsistent_scales: return "InconsistentScales";
    case errc::odd_length: return "OddLength";
    case errc::l_infeasible: return "LInfeasible";
    case errc::bad_grid: return "BadGrid";
    case errc::all_infeasible: return "AllInfeasible";
    case errc::series_too_short: return "SeriesTooShort";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::bad_params: return "BadParams";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace cpcv
