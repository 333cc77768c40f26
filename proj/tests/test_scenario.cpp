#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hetnet/errors.hpp"
#include "hetnet/scenario.hpp"

using namespace hetnet;

namespace {

ScenarioConfig seven_cells() {
  ScenarioConfig c;
  c.macro_count = 7;
  c.small_cells_per_macro = 4;
  c.locations_per_cell = 100;
  return c;
}

}  // namespace

TEST(Layout, HexRadiusForNineteenCells) {
  ScenarioConfig c;
  c.macro_count = 19;
  EXPECT_NEAR(c.cell_radius(), 288.675, 1e-3);
  const Layout l = build_layout(c);
  EXPECT_EQ(l.macro_count(), 19u);
  EXPECT_EQ(l.small_count(), 19u * 4u);
}

TEST(Layout, SingleMacroWithoutSmallCells) {
  ScenarioConfig c;
  c.macro_count = 1;
  c.small_cells_per_macro = 0;
  const Layout l = build_layout(c);
  ASSERT_EQ(l.base_stations.size(), 1u);
  ASSERT_EQ(l.wrap_group.size(), 1u);
  EXPECT_EQ(l.wrap_group[0].x, 0.0);
  EXPECT_EQ(l.wrap_group[0].y, 0.0);
}

TEST(Layout, SmallCellsAt230MetresUnderWrapMetric) {
  const Layout l = build_layout(seven_cells());
  ASSERT_EQ(l.macro_count(), 7u);
  ASSERT_EQ(l.small_count(), 28u);
  for (const auto& b : l.base_stations) {
    if (b.kind != BsKind::small) continue;
    const Point c = l.base_stations[b.home_macro].position;
    EXPECT_NEAR(std::hypot(b.position.x - c.x, b.position.y - c.y), 230.0, 1e-9);
    EXPECT_NEAR(l.distance(b.position, c), 230.0, 1e-9);
    EXPECT_EQ(b.color, l.base_stations[b.home_macro].color);
  }
}

TEST(Layout, WrapAroundMakesEveryMacroANeighbour) {
  // In a wrapped 7-cell cluster every pair of macros is adjacent.
  const Layout l = build_layout(seven_cells());
  for (std::size_t a = 0; a < 7; ++a)
    for (std::size_t b = a + 1; b < 7; ++b)
      EXPECT_NEAR(l.distance(l.base_stations[a].position, l.base_stations[b].position), 500.0, 1e-9);
}

TEST(Layout, EveryLocationInExactlyOneHexagon) {
  const ScenarioConfig c = seven_cells();
  const Layout l = build_layout(c);
  ASSERT_EQ(l.locations.size(), 700u);
  std::vector<std::size_t> per_cell(7, 0);
  for (const auto& loc : l.locations) {
    EXPECT_EQ(loc.id, &loc - l.locations.data());
    std::size_t inside = 0;
    for (std::size_t m = 0; m < 7; ++m) inside += l.in_cell(loc.position, l.base_stations[m].position) ? 1 : 0;
    EXPECT_EQ(inside, 1u);
    EXPECT_TRUE(l.in_cell(loc.position, l.base_stations[loc.home_macro].position));
    ++per_cell[loc.home_macro];
  }
  for (const auto n : per_cell) EXPECT_EQ(n, 100u);
}

TEST(Layout, NoCoLocatedBaseStations) {
  const Layout l = build_layout(seven_cells());
  for (std::size_t a = 0; a < l.base_stations.size(); ++a)
    for (std::size_t b = a + 1; b < l.base_stations.size(); ++b)
      EXPECT_GT(l.distance(l.base_stations[a].position, l.base_stations[b].position), 1.0);
}

TEST(Layout, ColoursWithinReuseFactor) {
  for (const std::size_t r : {1u, 3u, 7u}) {
    ScenarioConfig c = seven_cells();
    c.reuse_factor = r;
    for (const auto& b : build_layout(c).base_stations) EXPECT_LT(b.color, r);
  }
}

TEST(Layout, WrapMetricSymmetricAndBelowEuclidean) {
  const Layout l = build_layout(seven_cells());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-900.0, 900.0);
  for (int n = 0; n < 500; ++n) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_EQ(l.distance(a, b), l.distance(b, a));
    EXPECT_LE(l.distance(a, b), std::hypot(a.x - b.x, a.y - b.y));
  }
}

TEST(Layout, RejectsSmallCellOutsideHexagon) {
  ScenarioConfig c = seven_cells();
  c.sc_distance_from_center = 290.0;
  EXPECT_THROW(build_layout(c), ConfigError);
}

TEST(Layout, RejectsUnsupportedClusterSize) {
  ScenarioConfig c = seven_cells();
  c.macro_count = 5;
  EXPECT_THROW(build_layout(c), ConfigError);
}

TEST(PathLoss, MacroAt500Metres) {
  EXPECT_NEAR(path_loss_macro_db(500.0), 116.68, 5e-3);
}

TEST(PathLoss, SmallCellAt100Metres) {
  EXPECT_NEAR(path_loss_small_db(100.0), 104.0, 5e-3);
}

TEST(PathLoss, ClampedBelowValidityFloor) {
  EXPECT_EQ(path_loss_macro_db(5.0), path_loss_macro_db(kMacroMinDistance));
  EXPECT_EQ(path_loss_small_db(1.0), path_loss_small_db(kSmallMinDistance));
}

TEST(Gains, DeterministicPerSeed) {
  const ScenarioConfig c = seven_cells();
  const Layout l = build_layout(c);
  const GainTable a = sample_gains(l, c, 42);
  const GainTable b = sample_gains(l, c, 42);
  EXPECT_EQ(a.gain_db, b.gain_db);
  EXPECT_EQ(a.gain_lin, b.gain_lin);
  EXPECT_NE(a.gain_db, sample_gains(l, c, 43).gain_db);
}

TEST(Gains, PositiveAndFinite) {
  const ScenarioConfig c = seven_cells();
  const Scenario s = make_scenario(c);
  for (const double g : s.gains.gain_lin) {
    EXPECT_GT(g, 0.0);
    EXPECT_TRUE(std::isfinite(g));
  }
}

TEST(Gains, StrictlyDecreasingWithDistanceWithoutShadowing) {
  ScenarioConfig c = seven_cells();
  c.shadowing_std = 0.0;
  const Scenario s = make_scenario(c);
  for (std::size_t b = 0; b < s.gains.bs_count; ++b) {
    const double floor = s.layout.base_stations[b].kind == BsKind::macro ? kMacroMinDistance : kSmallMinDistance;
    for (std::size_t i = 0; i + 1 < s.gains.location_count; ++i) {
      const double d1 = s.gains.distance(i, b), d2 = s.gains.distance(i + 1, b);
      if (d1 < floor || d2 < floor || std::abs(d1 - d2) < 1e-9) continue;
      EXPECT_EQ(d1 < d2, s.gains.at_db(i, b) > s.gains.at_db(i + 1, b));
    }
  }
}

TEST(Gains, ComposedFromPathLossPenetrationAndAntennas) {
  ScenarioConfig c = seven_cells();
  c.shadowing_std = 0.0;
  c.antenna_gain_bs = 3.0;
  c.antenna_gain_ue = 1.0;
  const Scenario s = make_scenario(c);
  EXPECT_NEAR(s.gains.at_db(5, 0), -s.gains.path_loss(5, 0) - 20.0 + 4.0, 1e-12);
}

TEST(Traffic, HomogeneousWeights) {
  const Scenario s = make_scenario(seven_cells());
  const double sum = std::accumulate(s.traffic.alpha.begin(), s.traffic.alpha.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (const double a : s.traffic.alpha) EXPECT_EQ(a, 1.0 / 700.0);
}

TEST(Traffic, FullScaleHomogeneousWeight) {
  // alpha_i = 1 / (2000 x 19)
  EXPECT_NEAR(1.0 / (2000.0 * 19.0), 2.63e-5, 5e-8);
}

TEST(Traffic, FullScaleHotSpotWeights) {
  // 19 cells x 2000 locations, 500 of them in each hot spot.
  std::vector<bool> inside(19 * 2000, false);
  for (std::size_t c = 0; c < 19; ++c)
    for (std::size_t i = 0; i < 500; ++i) inside[c * 2000 + i] = true;
  const auto w = normalized_hotspot_weights(inside, 6.58e-5, 1.32e-5);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  // The raw split sums to 1.0013; after rescaling the values stay within 0.2%.
  EXPECT_NEAR(w[0] / 6.58e-5, 1.0, 2e-3);
  EXPECT_NEAR(w[600] / 1.32e-5, 1.0, 2e-3);
  EXPECT_NEAR(w[0] / w[600], 6.58 / 1.32, 1e-12);
}

TEST(Traffic, HotSpotOnDeskLayout) {
  ScenarioConfig c = seven_cells();
  c.traffic.kind = TrafficKind::hotspot;
  const Scenario s = make_scenario(c);
  const auto n_in = std::count(s.traffic.in_hotspot.begin(), s.traffic.in_hotspot.end(), true);
  EXPECT_GT(n_in, 0);
  EXPECT_LT(n_in, 700);
  EXPECT_NEAR(std::accumulate(s.traffic.alpha.begin(), s.traffic.alpha.end(), 0.0), 1.0, 1e-12);
  for (std::size_t i = 0; i < 700; ++i) {
    const double expected = s.traffic.in_hotspot[i] ? 6.58e-5 : 1.32e-5;
    EXPECT_NEAR(s.traffic.alpha[i] / s.traffic.alpha[0] * (s.traffic.in_hotspot[0] ? 6.58e-5 : 1.32e-5), expected,
                1e-15);
  }
}

TEST(Traffic, EmptyHotSpotRejected) {
  ScenarioConfig c = seven_cells();
  c.traffic.kind = TrafficKind::hotspot;
  c.traffic.hotspot_side_m = 0.5;
  EXPECT_THROW(make_scenario(c), ConfigError);
}

TEST(Scenario, PureFunctionOfConfig) {
  const ScenarioConfig c = seven_cells();
  const Scenario a = make_scenario(c), b = make_scenario(c);
  EXPECT_EQ(a.gains.gain_db, b.gains.gain_db);
  EXPECT_EQ(a.traffic.alpha, b.traffic.alpha);
}

TEST(Config, RejectsInvalidValues) {
  auto bad = [](auto mutate) {
    ScenarioConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](ScenarioConfig& c) { c.rho_bar = 1.0; });
  bad([](ScenarioConfig& c) { c.rho_bar = 0.0; });
  bad([](ScenarioConfig& c) { c.p_small = 50.0; });
  bad([](ScenarioConfig& c) { c.reuse_factor = 2; });
  bad([](ScenarioConfig& c) { c.locations_per_cell = 0; });
  bad([](ScenarioConfig& c) { c.inter_site_distance = -1.0; });
  bad([](ScenarioConfig& c) {
    c.small_cells_per_macro = 0;
    c.traffic.kind = TrafficKind::hotspot;
  });
}
