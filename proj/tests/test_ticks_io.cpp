#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hfdecon/errors.h"
#include "hfdecon/io.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"
#include "hfdecon/ticks.h"

using namespace hfdecon;

namespace {

constexpr double kDay0 = 19000.0 * 86400.0;

RawTickRecord rec(double secs_after_open, double price, std::string cond = "", std::optional<int> corr = {},
                  int day = 0) {
  return {kDay0 + day * 86400.0 + kSessionOpenSeconds + secs_after_open, price, std::move(cond), corr};
}

}  // namespace

TEST(Preprocess, EmptyInputGivesEmptyOutput) { EXPECT_FALSE(preprocess_ticks({}).has_value()); }

TEST(Preprocess, MedianAtDuplicateTimestamp) {
  const auto s = preprocess_ticks({rec(10, 10.0), rec(10, 12.0), rec(10, 11.0), rec(20, 5.0)});
  ASSERT_TRUE(s);
  ASSERT_EQ(s->size(), 2u);
  EXPECT_DOUBLE_EQ(s->y[0], std::log(11.0));
  EXPECT_DOUBLE_EQ(s->y[1], std::log(5.0));
}

TEST(Preprocess, DropRules) {
  const auto s = preprocess_ticks({
      rec(1, -1.0),                // negative price
      rec(2, 0.0),                 // zero price
      rec(3, 10.0, "", -1),        // negative correlation indicator
      rec(4, 10.0, "Z"),           // other condition letter
      rec(-60, 10.0),              // before the open
      rec(23400 + 1, 10.0),        // after the close
      rec(5, 20.0, "E"),           // kept
      rec(6, 21.0, "F", 0),        // kept
      rec(7, 22.0, "", 3),         // kept
      rec(23400, 23.0),            // at the close, kept
  });
  ASSERT_TRUE(s);
  ASSERT_EQ(s->size(), 4u);
  EXPECT_DOUBLE_EQ(s->y[0], std::log(20.0));
  EXPECT_DOUBLE_EQ(s->y[3], std::log(23.0));
  EXPECT_THROW(preprocess_ticks({rec(1, -1.0), rec(2, 3.0, "X")}), EstimationError);
}

TEST(Preprocess, TimesInYearFractions) {
  const auto s = preprocess_ticks({rec(0, 10.0), rec(11700, 10.5), rec(100, 11.0, "", {}, 3)});
  ASSERT_TRUE(s);
  const double year = 252.0 * 23400.0;
  EXPECT_DOUBLE_EQ(s->grid[0], 0.0);
  EXPECT_DOUBLE_EQ(s->grid[1], 11700.0 / year);
  // Trading days are counted consecutively whatever the calendar gap.
  EXPECT_DOUBLE_EQ(s->grid[2], (23400.0 + 100.0) / year);
}

TEST(Preprocess, UnsortedInputIsOrdered) {
  const auto s = preprocess_ticks({rec(30, 3.0), rec(10, 1.0), rec(20, 2.0)});
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->y[0], 0.0);
  EXPECT_DOUBLE_EQ(s->y[2], std::log(3.0));
}

TEST(Preprocess, Idempotent) {
  Rng r(3);
  std::vector<RawTickRecord> raw;
  for (int day = 0; day < 3; ++day) {
    double t = r.uniform(0.0, 5.0);
    while (t < 23400.0) {
      raw.push_back(rec(std::round(t), 100.0 * std::exp(0.001 * r.normal()), r.uniform() < 0.05 ? "Z" : "", {}, day));
      t += r.uniform(0.5, 20.0);
    }
  }
  const auto once = preprocess_ticks(raw);
  ASSERT_TRUE(once);
  const auto twice = preprocess_ticks(to_records(*once, 19000));
  ASSERT_TRUE(twice);
  ASSERT_EQ(twice->size(), once->size());
  for (std::size_t i = 0; i < once->size(); ++i) {
    EXPECT_NEAR(twice->grid[i], once->grid[i], 1e-15);
    EXPECT_NEAR(twice->y[i], once->y[i], 1e-14);
  }
}

TEST(Timestamps, IsoAndEpoch) {
  EXPECT_DOUBLE_EQ(parse_timestamp("1970-01-02T00:00:00"), 86400.0);
  EXPECT_DOUBLE_EQ(parse_timestamp("2024-03-01 09:30:00.5"), 1709285400.5);
  EXPECT_DOUBLE_EQ(parse_timestamp("1709285400.25"), 1709285400.25);
  EXPECT_THROW(parse_timestamp("2024-13-01T00:00:00"), std::invalid_argument);
  EXPECT_THROW(parse_timestamp("noon"), std::invalid_argument);
}

TEST(TieBreaking, UniformGapScales) {
  const std::vector<double> v{0.0, 0.5, 1.0, 1.5, 2.0};
  const auto a = tie_scales(v);
  for (std::size_t j = 1; j + 1 < v.size(); ++j) EXPECT_DOUBLE_EQ(a[j], 0.25);
}

TEST(TieBreaking, TiedZeros) {
  const std::vector<double> v{0.0, 0.0, 1.0};
  const auto a = tie_scales(v);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.5);
  EXPECT_DOUBLE_EQ(a[2], 0.5);
  EXPECT_THROW(tie_scales(std::vector<double>{2.0, 2.0}), std::invalid_argument);
}

TEST(TieBreaking, LargerGapWins) {
  const std::vector<double> v{0.0, 0.1, 1.0};
  const auto a = tie_scales(v);
  EXPECT_DOUBLE_EQ(a[1], 0.45);
}

TEST(TieBreaking, DeterministicAndTieFree) {
  Rng r(5);
  std::vector<double> v(2000);
  for (auto& x : v) x = std::round(r.normal() * 20.0) / 20.0;
  const auto a = break_ties(v, 42), b = break_ties(v, 42), c = break_ties(v, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(std::set<double>(a.begin(), a.end()).size(), a.size());
}

TEST(TieBreaking, KolmogorovDistanceSmall) {
  // Real-data-scale pattern: many small ticks on a fine price grid.
  Rng r(6);
  std::vector<double> v(20000);
  for (auto& x : v) x = std::round(r.normal() * 200.0) / 200.0;
  const auto p = break_ties(v, 7);
  std::vector<double> a(v), b(p);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Two-sample KS statistic by merging.
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    ks = std::max(ks, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  EXPECT_LE(ks, 0.01 + 0.5 / 200.0 * 0.8);
}

TEST(Csv, SeriesRoundTrip) {
  const auto grid = make_time_grid(300.0);
  const TickSeries s(grid, generate_noise({NoiseFamily::Normal, 0.01}, grid.size(), 1));
  std::stringstream ss;
  write_series_csv(ss, s);
  EXPECT_EQ(ss.str().substr(0, 11), "time,value\n");
  const auto back = read_series_csv(ss);
  EXPECT_EQ(back.grid.points(), s.grid.points());
  EXPECT_EQ(back.y, s.y);
}

TEST(Csv, SeriesRejectsMalformed) {
  std::stringstream a("t,v\n0,1\n");
  EXPECT_THROW(read_series_csv(a), FormatError);
  std::stringstream b("time,value\n0,1\n1,x\n");
  EXPECT_THROW(read_series_csv(b), FormatError);
  std::stringstream c("time,value\n0,1\n0,2\n");
  EXPECT_THROW(read_series_csv(c), FormatError);
}

TEST(Csv, TickIngestion) {
  std::stringstream ss(
      "price,timestamp,venue,cond,corr\n"
      "10.5,2024-03-01T09:30:01,X,,\n"
      "10.6,1709285402,Y,E,0\n"
      "10.7,2024-03-01 09:30:03,Z,Z,-1\n");
  const auto recs = read_ticks_csv(ss);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_DOUBLE_EQ(recs[0].price, 10.5);
  EXPECT_DOUBLE_EQ(recs[0].timestamp, 1709285401.0);
  EXPECT_TRUE(recs[0].condition_code.empty());
  EXPECT_FALSE(recs[0].correlation_indicator);
  EXPECT_EQ(recs[1].condition_code, "E");
  EXPECT_EQ(*recs[2].correlation_indicator, -1);
  const auto s = preprocess_ticks(recs);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->size(), 2u);
  std::stringstream bad("when,price\n1,2\n");
  EXPECT_THROW(read_ticks_csv(bad), FormatError);
}

TEST(Csv, CharFnAndDensityHeaders) {
  CharFnEstimate cf{{0.0, 1.0}, {1.0, 0.5}, 1.0, CharFnKind::ErrorFU1};
  std::stringstream a;
  write_charfn_csv(a, cf);
  EXPECT_EQ(a.str(), "s,value\n0,1\n1,0.5\n");
  DensityEstimate d;
  d.x_grid = {-1.0, 1.0};
  d.values = {0.25, 0.125};
  std::stringstream b;
  write_density_csv(b, d);
  EXPECT_EQ(b.str(), "x,fhat\n-1,0.25\n1,0.125\n");
}

TEST(Json, RecordShapes) {
  MomentSet m{0.5, {2.0, 12.0}, {1.0, 3.0}};
  const auto jm = to_json(m);
  EXPECT_EQ(jm["k"], 2);
  EXPECT_EQ(jm["m_u"][1], 3.0);
  VolatilityResult v;
  v.beta_hat = 0.1;
  v.m = 50;
  const auto jv = to_json(v);
  for (const char* key : {"beta_hat", "rv_baseline", "xi", "m", "S", "flagged_negative"}) EXPECT_TRUE(jv.contains(key));
  BandwidthSelection b;
  b.h1 = 2.0;
  b.h2 = 4.0;
  b.h_hat = 1.0;
  b.ise_surface = {{1.0, std::numeric_limits<double>::infinity()}};
  const auto jb = to_json(b);
  for (const char* key : {"h1", "xi1", "h2", "h_hat", "xi_hat"}) EXPECT_TRUE(jb.contains(key));
  EXPECT_TRUE(jb["ise_surface"][0][1].is_null());
  const auto ji = to_json(IseRecord{30.0, "i", "normal", "sinc", 0.29});
  EXPECT_EQ(ji["delta_s"], 30.0);
  EXPECT_EQ(ji["kernel"], "sinc");
}
