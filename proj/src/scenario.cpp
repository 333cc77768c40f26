#include "hetnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hetnet/errors.hpp"

namespace hetnet {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

struct Axial {
  int q;
  int r;
};

// Sites of a hexagonal cluster of the given ring count, centre first.
std::vector<Axial> cluster_sites(int rings) {
  std::vector<Axial> sites{{0, 0}};
  for (int ring = 1; ring <= rings; ++ring) {
    // Walk the ring from (ring, 0) along the six axial directions.
    static constexpr std::array<Axial, 6> dirs{{{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}}};
    Axial cur{ring, 0};
    for (const auto& d : dirs) {
      for (int step = 0; step < ring; ++step) {
        sites.push_back(cur);
        cur.q += d.q;
        cur.r += d.r;
      }
    }
  }
  return sites;
}

Point axial_to_point(Axial a, double isd) {
  return {isd * (a.q + 0.5 * a.r), isd * (kSqrt3 / 2.0) * a.r};
}

int cluster_rings(std::size_t macro_count) {
  switch (macro_count) {
    case 1: return 0;
    case 7: return 1;
    case 19: return 2;
    default: return -1;
  }
}

// Cluster translation (i, j) with i^2 + ij + j^2 == cluster size.
Axial cluster_translation(std::size_t macro_count) {
  return macro_count == 7 ? Axial{2, 1} : Axial{3, 2};
}

std::size_t reuse_color(Axial a, std::size_t reuse) {
  // Linear residue colourings that are proper on the infinite hex lattice.
  int shift = 0;
  switch (reuse) {
    case 1: return 0;
    case 3: shift = 2; break;
    case 7: shift = 3; break;
    default: break;
  }
  const int m = static_cast<int>(reuse);
  return static_cast<std::size_t>(((a.q + shift * a.r) % m + m) % m);
}

Point rotate(Point p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

std::size_t count_in_hexagon(double spacing, double ox, double oy, double isd,
                             std::vector<Point>* out) {
  const double radius = isd / kSqrt3;
  const int n = static_cast<int>(std::ceil(radius / spacing)) + 1;
  std::size_t count = 0;
  Layout probe;
  probe.inter_site_distance = isd;
  for (int iy = -n; iy <= n; ++iy) {
    for (int ix = -n; ix <= n; ++ix) {
      const Point p{(ix + ox) * spacing, (iy + oy) * spacing};
      if (probe.in_cell(p, {0.0, 0.0})) {
        ++count;
        if (out != nullptr) out->push_back(p);
      }
    }
  }
  return count;
}

// A square-grid pattern with exactly `target` points inside the origin hexagon.
// The grid is offset by irrational fractions so the count changes one point at
// a time as the spacing shrinks.
std::vector<Point> grid_pattern(std::size_t target, double isd) {
  constexpr double ox = 0.3819660112501051;
  constexpr double oy = 0.2360679774997897;
  const double area = 1.5 * kSqrt3 * (isd / kSqrt3) * (isd / kSqrt3);
  const double nominal = std::sqrt(area / static_cast<double>(target));

  double best_spacing = 0.0;
  double best_offset = 1e300;
  double fallback_spacing = 0.0;
  std::size_t fallback_count = 0;
  constexpr int kSteps = 6000;
  for (int s = 0; s <= kSteps; ++s) {
    const double spacing = nominal * (0.7 + 0.6 * s / kSteps);
    const std::size_t c = count_in_hexagon(spacing, ox, oy, isd, nullptr);
    if (c == target && std::abs(spacing - nominal) < best_offset) {
      best_offset = std::abs(spacing - nominal);
      best_spacing = spacing;
    }
    if (c > target && (fallback_count == 0 || c < fallback_count)) {
      fallback_count = c;
      fallback_spacing = spacing;
    }
  }
  std::vector<Point> pts;
  if (best_spacing > 0.0) {
    count_in_hexagon(best_spacing, ox, oy, isd, &pts);
    return pts;
  }
  // No exact hit: keep the `target` points nearest the centre.
  count_in_hexagon(fallback_spacing, ox, oy, isd, &pts);
  std::stable_sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return std::hypot(a.x, a.y) < std::hypot(b.x, b.y);
  });
  pts.resize(target);
  return pts;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double ScenarioConfig::cell_radius() const { return inter_site_distance / kSqrt3; }

double ScenarioConfig::noise_per_channel_w() const {
  return dbm_to_watts(noise_psd + 10.0 * std::log10(subchannel_bandwidth));
}

double ScenarioConfig::p_macro_w() const { return dbm_to_watts(p_macro); }
double ScenarioConfig::p_small_w() const { return dbm_to_watts(p_small); }

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("invalid scenario config: " + field + " " + why);
  };
  if (cluster_rings(macro_count) < 0) fail("macro_count", "must be 1, 7 or 19 (wrap-around clusters)");
  if (!(inter_site_distance > 0.0)) fail("inter_site_distance", "must be positive");
  if (small_cells_per_macro > 0) {
    if (!(sc_distance_from_center > 0.0)) fail("sc_distance_from_center", "must be positive");
    if (sc_distance_from_center >= cell_radius()) fail("sc_distance_from_center", "must be below the cell radius");
  }
  if (locations_per_cell == 0) fail("locations_per_cell", "must be positive");
  if (!(shadowing_std >= 0.0)) fail("shadowing_std", "must be non-negative");
  if (!(subchannel_bandwidth > 0.0)) fail("subchannel_bandwidth", "must be positive");
  if (total_subchannels_per_macro < 2) fail("total_subchannels_per_macro", "must be at least 2");
  if (reuse_factor != 1 && reuse_factor != 3 && reuse_factor != 7) fail("reuse_factor", "must be 1, 3 or 7");
  if (!std::isfinite(p_macro) || !std::isfinite(p_small)) fail("p_macro/p_small", "must be finite");
  if (!(p_macro > p_small)) fail("p_macro", "must exceed p_small");
  if (!(mean_file_size > 0.0)) fail("mean_file_size", "must be positive");
  if (!(rho_bar > 0.0 && rho_bar < 1.0)) fail("rho_bar", "must lie in (0, 1)");
  if (traffic.kind == TrafficKind::hotspot) {
    if (small_cells_per_macro == 0) fail("traffic", "hotspot profile needs small cells");
    if (traffic.hotspot_small_index >= small_cells_per_macro) fail("traffic.small_index", "out of range");
    if (!(traffic.hotspot_side_m > 0.0)) fail("traffic.side_m", "must be positive");
    if (!(traffic.weight_inside > 0.0) || !(traffic.weight_outside >= 0.0))
      fail("traffic.weights", "must be positive");
  }
}

std::size_t Layout::macro_count() const {
  return static_cast<std::size_t>(std::count_if(base_stations.begin(), base_stations.end(),
                                                [](const BaseStation& b) { return b.kind == BsKind::macro; }));
}

double Layout::distance(Point a, Point b) const {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  double best = std::hypot(dx, dy);
  for (const auto& v : wrap_group) best = std::min(best, std::hypot(dx - v.x, dy - v.y));
  return best;
}

bool Layout::in_cell(Point p, Point centre) const {
  const double dx = p.x - centre.x;
  const double dy = p.y - centre.y;
  const double half = inter_site_distance / 2.0;
  // Projections onto the three neighbour directions (0, 60, 120 degrees).
  const double p0 = dx;
  const double p1 = 0.5 * dx + (kSqrt3 / 2.0) * dy;
  const double p2 = -0.5 * dx + (kSqrt3 / 2.0) * dy;
  return std::abs(p0) < half && std::abs(p1) < half && std::abs(p2) < half;
}

double path_loss_macro_db(double distance_m) {
  const double d = std::max(distance_m, kMacroMinDistance);
  return 128.0 + 37.6 * std::log10(d / 1000.0);
}

double path_loss_small_db(double distance_m) {
  const double d = std::max(distance_m, kSmallMinDistance);
  return 140.7 + 36.7 * std::log10(d / 1000.0);
}

Layout build_layout(const ScenarioConfig& config) {
  config.validate();
  Layout layout;
  layout.inter_site_distance = config.inter_site_distance;
  const double isd = config.inter_site_distance;
  const int rings = cluster_rings(config.macro_count);
  const auto sites = cluster_sites(rings);

  layout.wrap_group.push_back({0.0, 0.0});
  if (config.macro_count > 1) {
    const Point t = axial_to_point(cluster_translation(config.macro_count), isd);
    // Exact negatives keep the wrap metric bitwise symmetric.
    for (int k = 0; k < 3; ++k) {
      const Point v = rotate(t, k * std::numbers::pi / 3.0);
      layout.wrap_group.push_back(v);
      layout.wrap_group.push_back({-v.x, -v.y});
    }
  }

  for (std::size_t m = 0; m < sites.size(); ++m) {
    layout.base_stations.push_back({m, BsKind::macro, axial_to_point(sites[m], isd), m,
                                    reuse_color(sites[m], config.reuse_factor)});
  }
  const std::size_t b = config.small_cells_per_macro;
  const double offset = config.sc_azimuth_offset_deg * std::numbers::pi / 180.0;
  for (std::size_t m = 0; m < sites.size(); ++m) {
    const Point c = layout.base_stations[m].position;
    for (std::size_t s = 0; s < b; ++s) {
      const double angle = offset + 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(b);
      const Point p{c.x + config.sc_distance_from_center * std::cos(angle),
                    c.y + config.sc_distance_from_center * std::sin(angle)};
      if (!layout.in_cell(p, c)) {
        throw ConfigError("invalid scenario config: small cell falls outside its macro hexagon");
      }
      layout.base_stations.push_back(
          {layout.base_stations.size(), BsKind::small, p, m, layout.base_stations[m].color});
    }
  }

  const auto pattern = grid_pattern(config.locations_per_cell, isd);
  for (std::size_t m = 0; m < sites.size(); ++m) {
    const Point c = layout.base_stations[m].position;
    for (const auto& p : pattern) {
      layout.locations.push_back({layout.locations.size(), {c.x + p.x, c.y + p.y}, m});
    }
  }
  return layout;
}

GainTable sample_gains(const Layout& layout, const ScenarioConfig& config, std::uint64_t seed) {
  GainTable g;
  g.location_count = layout.locations.size();
  g.bs_count = layout.base_stations.size();
  const std::size_t n = g.location_count * g.bs_count;
  g.distance_m.resize(n);
  g.path_loss_db.resize(n);
  g.gain_db.resize(n);
  g.gain_lin.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> shadow(0.0, 1.0);
  const double fixed = -config.penetration_loss + config.antenna_gain_ue + config.antenna_gain_bs;
  for (std::size_t i = 0; i < g.location_count; ++i) {
    for (std::size_t j = 0; j < g.bs_count; ++j) {
      const auto& bs = layout.base_stations[j];
      const double d = layout.distance(layout.locations[i].position, bs.position);
      const double pl = bs.kind == BsKind::macro ? path_loss_macro_db(d) : path_loss_small_db(d);
      const double s = config.shadowing_std > 0.0 ? config.shadowing_std * shadow(rng) : 0.0;
      const std::size_t k = i * g.bs_count + j;
      g.distance_m[k] = d;
      g.path_loss_db[k] = pl;
      g.gain_db[k] = -pl - s + fixed;
      g.gain_lin[k] = db_to_linear(g.gain_db[k]);
    }
  }
  return g;
}

std::vector<double> normalized_hotspot_weights(const std::vector<bool>& inside, double weight_inside,
                                               double weight_outside) {
  std::vector<double> w(inside.size());
  double total = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    w[i] = inside[i] ? weight_inside : weight_outside;
    total += w[i];
  }
  if (!(total > 0.0)) throw ConfigError("traffic weights sum to zero");
  for (auto& x : w) x /= total;
  return w;
}

TrafficProfile build_traffic(const ScenarioConfig& config, const Layout& layout) {
  TrafficProfile t;
  const std::size_t l = layout.locations.size();
  t.in_hotspot.assign(l, false);
  if (config.traffic.kind == TrafficKind::homogeneous) {
    t.alpha.assign(l, 1.0 / static_cast<double>(l));
    return t;
  }
  const double half = config.traffic.hotspot_side_m / 2.0;
  const std::size_t macros = layout.macro_count();
  const std::size_t b = config.small_cells_per_macro;
  for (std::size_t m = 0; m < macros; ++m) {
    const Point c = layout.base_stations[macros + m * b + config.traffic.hotspot_small_index].position;
    std::size_t hits = 0;
    for (const auto& loc : layout.locations) {
      for (const auto& v : layout.wrap_group) {
        const double dx = loc.position.x - (c.x + v.x);
        const double dy = loc.position.y - (c.y + v.y);
        if (std::abs(dx) <= half && std::abs(dy) <= half) {
          t.in_hotspot[loc.id] = true;
          ++hits;
          break;
        }
      }
    }
    if (hits == 0) {
      throw ConfigError("hot-spot square of macro " + std::to_string(m) + " contains no locations");
    }
  }
  t.alpha = normalized_hotspot_weights(t.in_hotspot, config.traffic.weight_inside, config.traffic.weight_outside);
  return t;
}

Scenario make_scenario(const ScenarioConfig& config) {
  Scenario s;
  s.config = config;
  s.layout = build_layout(config);
  s.gains = sample_gains(s.layout, config, config.seed);
  s.traffic = build_traffic(config, s.layout);
  return s;
}

}  // namespace hetnet
