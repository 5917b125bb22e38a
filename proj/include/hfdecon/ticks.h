#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfdecon/model_sim.h"

namespace hfdecon {

/// One raw trade print before cleaning.
struct RawTickRecord {
  /// Seconds since the Unix epoch, read in exchange-local wall-clock time
  /// (no time-zone conversion is applied).
  double timestamp = 0.0;
  double price = 0.0;
  std::string condition_code;
  std::optional<int> correlation_indicator;
};

inline constexpr double kSessionOpenSeconds = 9.5 * 3600.0;
inline constexpr double kSessionCloseSeconds = 16.0 * 3600.0;

/// Drops nonpositive prices, negative correlation indicators, condition
/// codes other than empty/E/F and prints outside 9:30-16:00; replaces
/// prints sharing a timestamp by their median price; returns log prices on
/// year-fraction times (day index + seconds since the open over 23400, all
/// divided by 252). An empty input gives an empty series; input that is
/// nonempty but fully removed throws EstimationError.
std::optional<TickSeries> preprocess_ticks(std::vector<RawTickRecord> records);

/// Inverse mapping of preprocess_ticks' (time, value) convention, used to
/// round-trip cleaned series. `first_day` is the epoch day of day index 0.
std::vector<RawTickRecord> to_records(const TickSeries& series, std::int64_t first_day);

/// Tie-breaking perturbation: value j gets N(0, a_j^2) noise with 2 a_j the
/// larger of its gaps to the nearest distinct smaller and larger values.
/// Needs at least two distinct values.
std::vector<double> break_ties(std::span<const double> values, std::uint64_t seed);

/// Half-gaps a_j used by break_ties.
std::vector<double> tie_scales(std::span<const double> values);

/// Parses "YYYY-MM-DD[T ]HH:MM:SS[.fff]" or a plain epoch-seconds number.
double parse_timestamp(const std::string& text);

}  // namespace hfdecon
