#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/scenario.hpp"

namespace hetnet {

enum class RaKind { ccd, od, psd };

/// Resource-allocation scheme.  `k` is the number of sub-channels given to the
/// small-cell tier (OD) or shared between tiers (PSD); CCD has none.
struct RaScheme {
  RaKind kind = RaKind::ccd;
  std::optional<std::size_t> k;

  static RaScheme ccd() { return {RaKind::ccd, std::nullopt}; }
  static RaScheme od(std::size_t k) { return {RaKind::od, k}; }
  static RaScheme psd(std::size_t k) { return {RaKind::psd, k}; }

  /// Throws ConfigError unless 1 <= k <= m - 1 for OD/PSD.
  void validate(std::size_t m) const;
};

std::string_view to_string(RaKind kind);
RaKind parse_ra_kind(std::string_view text);

enum class Band { shared, dedicated, full };
std::string_view to_string(Band band);

/// A (physical BS, band) pair acting as one queue.
struct VirtualBs {
  std::size_t id = 0;
  std::size_t physical_bs = 0;
  BsKind kind = BsKind::macro;
  std::size_t color = 0;
  Band band = Band::full;
  std::size_t channels = 0;          // K_j
  double power_per_channel_w = 0.0;  // P_j
  std::vector<std::size_t> interferers;
};

/// LTE-style discrete rate table: thresholds in dB, efficiencies in
/// bits/symbol.  The defaults are the fifteen CQI levels.
struct McsTable {
  std::vector<double> thresholds_db{-6.5, -4.0, -2.6, -1.0, 1.0, 3.0, 6.6, 10.0,
                                    11.4, 11.8, 13.0, 13.8, 15.6, 16.8, 17.6};
  std::vector<double> efficiencies{0.15, 0.23, 0.38, 0.60, 0.88, 1.18, 1.48, 1.91,
                                   2.41, 2.73, 3.32, 3.90, 4.52, 5.12, 5.55};
  double subcarriers = 12.0;
  double symbols = 14.0;
  double subframe_s = 1e-3;

  void validate() const;
  double symbol_rate() const { return subcarriers * symbols / subframe_s; }
};

/// Per-channel bit rate for a SINR given in dB; 0 below the lowest threshold.
double mcs_rate_db(double sinr_db, const McsTable& mcs);
/// Same for a linear SINR.
double mcs_rate(double sinr, const McsTable& mcs);

struct LinkTable {
  std::size_t location_count = 0;
  std::vector<VirtualBs> virtuals;
  std::vector<double> sinr;  // [location][virtual], linear
  std::vector<double> rate;  // [location][virtual], bit/s per sub-channel

  std::size_t vbs_count() const { return virtuals.size(); }
  double sinr_at(std::size_t loc, std::size_t v) const { return sinr[loc * virtuals.size() + v]; }
  double rate_at(std::size_t loc, std::size_t v) const { return rate[loc * virtuals.size() + v]; }
  std::size_t channels(std::size_t v) const { return virtuals[v].channels; }
};

std::vector<VirtualBs> expand_virtual(const Scenario& scenario, const RaScheme& ra);

/// SINR table [location][virtual] with the load-independent interference model.
std::vector<double> compute_sinr(const Scenario& scenario, const std::vector<VirtualBs>& virtuals);

LinkTable build_link_table(const Scenario& scenario, const RaScheme& ra, const McsTable& mcs = {});

}  // namespace hetnet
