#pragma once

#include <cmath>
#include <vector>

#include "hetnet/phy.hpp"
#include "hetnet/scenario.hpp"

namespace fixture {

struct BsSpec {
  hetnet::BsKind kind;
  std::size_t color = 0;
  std::size_t home = 0;
};

/// Scenario with hand-set linear gains [loc][bs] and path losses in dB.
inline hetnet::Scenario hand_scenario(const std::vector<BsSpec>& bss, const std::vector<std::vector<double>>& gain,
                                      const std::vector<std::vector<double>>& path_loss = {}) {
  hetnet::Scenario s;
  s.config.macro_count = 1;
  s.config.small_cells_per_macro = 0;
  for (std::size_t b = 0; b < bss.size(); ++b) {
    s.layout.base_stations.push_back({b, bss[b].kind, {static_cast<double>(b), 0.0}, bss[b].home, bss[b].color});
  }
  for (std::size_t i = 0; i < gain.size(); ++i) s.layout.locations.push_back({i, {0.0, 0.0}, 0});
  s.layout.wrap_group = {{0.0, 0.0}};
  auto& g = s.gains;
  g.location_count = gain.size();
  g.bs_count = bss.size();
  for (std::size_t i = 0; i < gain.size(); ++i) {
    for (std::size_t b = 0; b < bss.size(); ++b) {
      g.gain_lin.push_back(gain[i][b]);
      g.gain_db.push_back(10.0 * std::log10(gain[i][b]));
      g.path_loss_db.push_back(path_loss.empty() ? -10.0 * std::log10(gain[i][b]) : path_loss[i][b]);
      g.distance_m.push_back(0.0);
    }
  }
  s.traffic.alpha.assign(gain.size(), 1.0 / static_cast<double>(gain.size()));
  s.traffic.in_hotspot.assign(gain.size(), false);
  return s;
}

/// LinkTable from explicit SINRs in dB; virtual j is macro unless listed small.
inline hetnet::LinkTable link_from_db(const std::vector<std::vector<double>>& sinr_db,
                                      const std::vector<bool>& small = {}) {
  hetnet::LinkTable t;
  t.location_count = sinr_db.size();
  const std::size_t n = sinr_db.empty() ? 0 : sinr_db[0].size();
  for (std::size_t j = 0; j < n; ++j) {
    hetnet::VirtualBs v;
    v.id = j;
    v.physical_bs = j;
    v.kind = (!small.empty() && small[j]) ? hetnet::BsKind::small : hetnet::BsKind::macro;
    v.channels = 10;
    v.power_per_channel_w = 1.0;
    t.virtuals.push_back(v);
  }
  const hetnet::McsTable mcs;
  for (const auto& row : sinr_db) {
    for (const double d : row) {
      const double lin = std::pow(10.0, d / 10.0);
      t.sinr.push_back(lin);
      t.rate.push_back(hetnet::mcs_rate(lin, mcs));
    }
  }
  return t;
}

}  // namespace fixture
