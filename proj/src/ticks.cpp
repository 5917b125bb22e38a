#include "hfdecon/ticks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "hfdecon/errors.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"

namespace hfdecon {

namespace {

constexpr double kSecondsPerDay = 86400.0;

bool keep_record(const RawTickRecord& r) {
  if (!std::isfinite(r.timestamp) || !std::isfinite(r.price) || r.price <= 0.0) return false;
  if (r.correlation_indicator && *r.correlation_indicator < 0) return false;
  if (!r.condition_code.empty() && r.condition_code != "E" && r.condition_code != "F") return false;
  const double day = std::floor(r.timestamp / kSecondsPerDay);
  const double secs = r.timestamp - day * kSecondsPerDay;
  return secs >= kSessionOpenSeconds && secs <= kSessionCloseSeconds;
}

// Days from 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::optional<TickSeries> preprocess_ticks(std::vector<RawTickRecord> records) {
  if (records.empty()) return std::nullopt;
  std::vector<RawTickRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    if (keep_record(r)) kept.push_back(std::move(r));
  }
  if (kept.empty()) throw EstimationError("no tick records survive cleaning");
  std::stable_sort(kept.begin(), kept.end(),
                   [](const RawTickRecord& a, const RawTickRecord& b) { return a.timestamp < b.timestamp; });

  const double first_day = std::floor(kept.front().timestamp / kSecondsPerDay);
  std::map<std::int64_t, std::int64_t> day_index;
  std::vector<double> times, values, block;
  for (std::size_t i = 0; i < kept.size();) {
    std::size_t j = i;
    block.clear();
    while (j < kept.size() && kept[j].timestamp == kept[i].timestamp) block.push_back(kept[j++].price);
    const double ts = kept[i].timestamp;
    const auto day = static_cast<std::int64_t>(std::floor(ts / kSecondsPerDay) - first_day);
    day_index.try_emplace(day, static_cast<std::int64_t>(day_index.size()));
    const double secs = ts - std::floor(ts / kSecondsPerDay) * kSecondsPerDay - kSessionOpenSeconds;
    times.push_back((static_cast<double>(day_index[day]) * kSecondsPerTradingDay + secs) /
                    (kTradingDaysPerYear * kSecondsPerTradingDay));
    values.push_back(std::log(median(block)));
    i = j;
  }
  if (times.size() < 2) throw EstimationError("fewer than two distinct timestamps survive cleaning");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw EstimationError("session-close and next-open prints map to the same time");
    }
  }
  return TickSeries(TimeGrid(std::move(times)), std::move(values));
}

std::vector<RawTickRecord> to_records(const TickSeries& series, std::int64_t first_day) {
  std::vector<RawTickRecord> out;
  out.reserve(series.size());
  const auto& t = series.grid.points();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double session = t[i] * kTradingDaysPerYear;
    double day = std::floor(session);
    double secs = (session - day) * kSecondsPerTradingDay;
    // Close-of-session prints land exactly on an integer day count.
    if (day > 0 && secs < 1e-6 && i > 0 && t[i - 1] * kTradingDaysPerYear < day) {
      day -= 1.0;
      secs = kSecondsPerTradingDay;
    }
    RawTickRecord r;
    r.timestamp = (static_cast<double>(first_day) + day) * kSecondsPerDay + kSessionOpenSeconds + secs;
    r.price = std::exp(series.y[i]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> tie_scales(std::span<const double> values) {
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() < 2) throw std::invalid_argument("tie breaking needs at least two distinct values");
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double v = values[j];
    auto it = distinct.find(v);
    double gap = 0.0;
    if (it != distinct.begin()) gap = std::max(gap, v - *std::prev(it));
    if (std::next(it) != distinct.end()) gap = std::max(gap, *std::next(it) - v);
    out[j] = gap / 2.0;
  }
  return out;
}

std::vector<double> break_ties(std::span<const double> values, std::uint64_t seed) {
  const auto a = tie_scales(values);
  Rng rng(seed);
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += a[j] * rng.normal();
  return out;
}

double parse_timestamp(const std::string& text) {
  std::size_t pos = 0;
  if (text.find('-', 1) == std::string::npos && text.find(':') == std::string::npos) {
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad timestamp: " + text);
    return v;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, consumed = 0;
  char sep = 0;
  double s = 0.0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf%n", &y, &mo, &d, &sep, &h, &mi, &s, &consumed) != 7 ||
      static_cast<std::size_t>(consumed) != text.size() || (sep != 'T' && sep != ' ') || mo < 1 || mo > 12 ||
      d < 1 || d > 31 || h > 23 || mi > 59 || s < 0.0 || s >= 61.0) {
    throw std::invalid_argument("bad timestamp: " + text);
  }
  const auto days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return static_cast<double>(days) * kSecondsPerDay + h * 3600.0 + mi * 60.0 + s;
}

}  // namespace hfdecon
