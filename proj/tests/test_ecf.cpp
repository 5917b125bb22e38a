#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "hfdecon/ecf.h"
#include "hfdecon/errors.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"
#include "oracles.h"

using namespace hfdecon;

namespace {

TickSeries three_points() { return TickSeries(TimeGrid({0.0, 1.0, 2.0}), {0.0, 1.0, 0.0}); }

TickSeries random_series(std::size_t n, std::uint64_t seed, double jitter = 0.0) {
  Rng r(seed);
  std::vector<double> t(n + 1), y(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    t[j] = static_cast<double>(j) + (j > 0 && j < n ? r.uniform(-jitter, jitter) : 0.0);
    y[j] = r.normal() + 0.01 * static_cast<double>(j);
  }
  return TickSeries(TimeGrid(std::move(t)), std::move(y));
}

}  // namespace

TEST(Neighborhoods, ThreePointHandCount) {
  const auto idx = build_neighborhoods(TimeGrid({0.0, 1.0, 2.0}), 1.5);
  EXPECT_EQ(idx.total(), 4u);
  const auto pairs = idx.pairs();
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  EXPECT_EQ(pairs, want);
}

TEST(Neighborhoods, AdjacentPairsOnEquispacedGrid) {
  const auto grid = make_time_grid(30.0);
  const auto idx = build_neighborhoods(grid, grid[1] - grid[0]);
  EXPECT_EQ(idx.total(), 2u * 780u);
  for (std::size_t j = 1; j < 780; ++j) EXPECT_EQ(idx.count(j), 2u);
  EXPECT_EQ(idx.count(0), 1u);
  EXPECT_EQ(idx.count(780), 1u);
}

TEST(Neighborhoods, WindowCoveringHorizonIncludesAll) {
  const auto grid = make_time_grid(300.0);
  const std::size_t n = grid.intervals();
  const auto idx = build_neighborhoods(grid, grid.horizon());
  for (std::size_t j = 0; j <= n; ++j) EXPECT_EQ(idx.count(j), n);
  EXPECT_EQ(idx.total(), n * (n + 1));
}

TEST(Neighborhoods, EmptyWindowSignals) {
  EXPECT_THROW(build_neighborhoods(TimeGrid({0.0, 1.0, 2.0}), 0.5), EstimationError);
  EXPECT_THROW(build_neighborhoods(TimeGrid({0.0, 1.0, 2.0}), 0.0), std::invalid_argument);
}

TEST(Neighborhoods, PairsMatchDefinitionAndAreSymmetric) {
  const auto s = random_series(60, 3, 0.4);
  for (double xi : {0.7, 1.0, 2.3, 5.0}) {
    const auto idx = build_neighborhoods(s.grid, xi);
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& p : idx.pairs()) got.insert(p);
    std::set<std::pair<std::size_t, std::size_t>> want;
    for (std::size_t j = 0; j < s.size(); ++j) {
      for (std::size_t l = 0; l < s.size(); ++l) {
        if (l != j && std::fabs(s.grid[l] - s.grid[j]) <= xi) want.insert({j, l});
      }
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(idx.total(), want.size());
    for (const auto& [j, l] : want) EXPECT_TRUE(got.count({l, j}));
    std::size_t sum = 0;
    for (auto c : idx.counts()) sum += c;
    EXPECT_EQ(sum, idx.total());
  }
}

TEST(ErrorCharFn, ThreePointHandValue) {
  const auto s = three_points();
  const auto idx = build_neighborhoods(s.grid, 1.5);
  const std::vector<double> grid{std::numbers::pi / 3.0};
  EXPECT_NEAR(ecf_error(s, idx, grid).values[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(ecf_diff(s, idx, grid).values[0], 0.5, 1e-15);
}

TEST(ErrorCharFn, OriginIsOneAndConstantSeriesIsOne) {
  const auto s = random_series(40, 1);
  const auto idx = build_neighborhoods(s.grid, 2.0);
  const auto grid = linspace(-5.0, 5.0, 11);
  const auto cf = ecf_error(s, idx, grid);
  EXPECT_EQ(cf.values[5], 1.0);
  EXPECT_EQ(cf.kind, CharFnKind::ErrorFU1);
  const TickSeries flat(s.grid, std::vector<double>(s.size(), 3.0));
  for (double v : ecf_error(flat, idx, grid).values) EXPECT_EQ(v, 1.0);
}

TEST(ErrorCharFn, BoundsAndEvenness) {
  const auto s = random_series(200, 2, 0.3);
  const auto idx = build_neighborhoods(s.grid, 3.0);
  auto grid = linspace(-30.0, 30.0, 601);
  for (std::size_t k = 0; k < 300; ++k) grid[k] = -grid[600 - k];
  const auto cf = ecf_error(s, idx, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_GE(cf.values[k], 0.0);
    EXPECT_LE(cf.values[k], 1.0);
    EXPECT_EQ(cf.values[k], cf.values[grid.size() - 1 - k]);
  }
}

TEST(ErrorCharFn, DiffIsSquare) {
  const auto s = random_series(100, 4);
  const auto idx = build_neighborhoods(s.grid, 2.0);
  const auto grid = linspace(0.0, 8.0, 97);
  const auto a = ecf_error(s, idx, grid);
  const auto b = ecf_diff(s, idx, grid);
  EXPECT_EQ(b.kind, CharFnKind::DiffFUtilde);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(b.values[k], a.values[k] * a.values[k]);
}

TEST(ErrorCharFn, DoubleLoopOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = random_series(50, seed, 0.45);
    for (double xi : {1.0, 2.2, 7.5}) {
      const auto idx = build_neighborhoods(s.grid, xi);
      const auto grid = linspace(-6.0, 6.0, 121);
      const auto got = ecf_diff(s, idx, grid);
      const auto ref = oracle::mean_cosine_pairs(s, xi, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(got.values[k], std::min(1.0, std::fabs(ref[k])), 1e-14);
      }
    }
  }
}

TEST(ErrorCharFn, FrequencyScaling) {
  const auto s = random_series(80, 5);
  const double c = 4.0;
  std::vector<double> yc(s.y);
  for (auto& v : yc) v *= c;
  const TickSeries sc(s.grid, yc);
  const auto idx = build_neighborhoods(s.grid, 2.0);
  const auto grid = linspace(0.0, 3.0, 61);
  std::vector<double> cgrid(grid);
  for (auto& v : cgrid) v *= c;
  const auto a = ecf_error(sc, idx, grid);
  const auto b = ecf_error(s, idx, cgrid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-14);
}

TEST(ErrorCharFn, UnorderedPairsGiveSameEstimate) {
  const auto s = random_series(70, 6, 0.2);
  const auto idx = build_neighborhoods(s.grid, 3.0);
  std::vector<double> diffs;
  for (const auto& [j, l] : idx.pairs()) {
    if (j < l) diffs.push_back(s.y[l] - s.y[j]);
  }
  const auto grid = linspace(0.0, 5.0, 51);
  const auto a = ecf_from_differences(diffs, grid, 3.0);
  const auto b = ecf_error(s, idx, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-14);
}

TEST(ErrorCharFn, LargeSeriesMatchesDirectCosines) {
  const auto grid = make_time_grid(5.0);
  const auto u = generate_noise({NoiseFamily::Normal, 0.005}, grid.size(), 7);
  const TickSeries s(grid, u);
  const auto idx = build_neighborhoods(grid, 2.0 * (grid[1] - grid[0]));
  const auto sg = linspace(0.0, 400.0, 2048);
  const auto cf = ecf_diff(s, idx, sg);
  for (std::size_t k = 0; k < sg.size(); k += 211) {
    long double acc = 0.0L;
    for (const auto& [j, l] : idx.pairs()) acc += std::cos(static_cast<long double>(sg[k]) * (s.y[l] - s.y[j]));
    EXPECT_NEAR(cf.values[k], std::min(1.0L, std::fabs(acc / idx.total())), 1e-14);
  }
}
