#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hetnet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class TrafficKind { homogeneous, hotspot };

/// Spatial traffic descriptor.  For `hotspot`, every macro cell carries one
/// square of `hotspot_side_m` centred on its small cell `hotspot_small_index`;
/// locations inside get raw weight `weight_inside`, the rest `weight_outside`,
/// and the weights are then rescaled to sum to one.
struct TrafficSpec {
  TrafficKind kind = TrafficKind::homogeneous;
  double hotspot_side_m = 150.0;
  std::size_t hotspot_small_index = 0;
  double weight_inside = 6.58e-5;
  double weight_outside = 1.32e-5;

  bool operator==(const TrafficSpec&) const = default;
};

struct ScenarioConfig {
  std::size_t macro_count = 7;
  std::size_t small_cells_per_macro = 4;
  double inter_site_distance = 500.0;        // m
  double sc_distance_from_center = 230.0;    // m
  double sc_azimuth_offset_deg = 0.0;
  std::size_t locations_per_cell = 100;
  double shadowing_std = 8.0;                // dB
  double penetration_loss = 20.0;            // dB
  double antenna_gain_ue = 0.0;              // dB
  double antenna_gain_bs = 0.0;              // dB
  double noise_psd = -174.0;                 // dBm/Hz
  double subchannel_bandwidth = 180e3;       // Hz
  std::size_t total_subchannels_per_macro = 100;
  std::size_t reuse_factor = 3;
  double p_macro = 46.0;                     // dBm
  double p_small = 30.0;                     // dBm
  double mean_file_size = 1e6;               // bits
  double rho_bar = 0.95;
  TrafficSpec traffic;
  std::uint64_t seed = 1;

  bool operator==(const ScenarioConfig&) const = default;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  double cell_radius() const;
  double noise_per_channel_w() const;
  double p_macro_w() const;
  double p_small_w() const;
};

enum class BsKind { macro, small };

struct BaseStation {
  std::size_t id = 0;
  BsKind kind = BsKind::macro;
  Point position;
  std::size_t home_macro = 0;
  std::size_t color = 0;
};

struct Location {
  std::size_t id = 0;
  Point position;
  std::size_t home_macro = 0;
};

class Layout {
 public:
  std::vector<BaseStation> base_stations;  // macros first, then small cells
  std::vector<Location> locations;
  std::vector<Point> wrap_group;           // always contains (0,0)
  double inter_site_distance = 0.0;

  /// Minimum distance over all mirror images of `b`.
  double distance(Point a, Point b) const;
  /// True if `p` lies in the hexagon of the macro at `centre` (no wrap).
  bool in_cell(Point p, Point centre) const;

  std::size_t macro_count() const;
  std::size_t small_count() const { return base_stations.size() - macro_count(); }
};

/// Per (location, base station) channel gain, row-major [location][bs].
struct GainTable {
  std::size_t location_count = 0;
  std::size_t bs_count = 0;
  std::vector<double> distance_m;
  std::vector<double> path_loss_db;
  std::vector<double> gain_db;
  std::vector<double> gain_lin;

  double gain_linear(std::size_t loc, std::size_t bs) const { return gain_lin[loc * bs_count + bs]; }
  double at_db(std::size_t loc, std::size_t bs) const { return gain_db[loc * bs_count + bs]; }
  double path_loss(std::size_t loc, std::size_t bs) const { return path_loss_db[loc * bs_count + bs]; }
  double distance(std::size_t loc, std::size_t bs) const { return distance_m[loc * bs_count + bs]; }
};

struct TrafficProfile {
  std::vector<double> alpha;
  std::vector<bool> in_hotspot;
};

/// One immutable network realisation.
struct Scenario {
  ScenarioConfig config;
  Layout layout;
  GainTable gains;
  TrafficProfile traffic;
};

// Path-loss models in dB; distances below the validity floor are clamped.
double path_loss_macro_db(double distance_m);
double path_loss_small_db(double distance_m);
inline constexpr double kMacroMinDistance = 35.0;
inline constexpr double kSmallMinDistance = 10.0;

Layout build_layout(const ScenarioConfig& config);
GainTable sample_gains(const Layout& layout, const ScenarioConfig& config, std::uint64_t seed);
TrafficProfile build_traffic(const ScenarioConfig& config, const Layout& layout);

/// Rescales raw per-location weights (inside/outside) to a probability vector.
std::vector<double> normalized_hotspot_weights(const std::vector<bool>& inside,
                                               double weight_inside, double weight_outside);

Scenario make_scenario(const ScenarioConfig& config);

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace hetnet
