#include "hetnet/phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetnet/errors.hpp"

namespace hetnet {

namespace {

bool bands_overlap(Band a, Band b) { return a == Band::full || b == Band::full || a == b; }

}  // namespace

void RaScheme::validate(std::size_t m) const {
  if (kind == RaKind::ccd) {
    if (k.has_value()) throw ConfigError("CCD takes no K");
    return;
  }
  if (!k.has_value()) throw ConfigError(std::string(to_string(kind)) + " requires K");
  if (*k < 1 || *k >= m) {
    throw ConfigError("K = " + std::to_string(*k) + " out of range [1, " + std::to_string(m - 1) + "]");
  }
}

std::string_view to_string(RaKind kind) {
  switch (kind) {
    case RaKind::ccd: return "ccd";
    case RaKind::od: return "od";
    case RaKind::psd: return "psd";
  }
  return "?";
}

RaKind parse_ra_kind(std::string_view text) {
  if (text == "ccd") return RaKind::ccd;
  if (text == "od") return RaKind::od;
  if (text == "psd") return RaKind::psd;
  throw ConfigError("unknown RA scheme '" + std::string(text) + "'");
}

std::string_view to_string(Band band) {
  switch (band) {
    case Band::shared: return "shared";
    case Band::dedicated: return "dedicated";
    case Band::full: return "full";
  }
  return "?";
}

void McsTable::validate() const {
  if (thresholds_db.empty() || thresholds_db.size() != efficiencies.size()) {
    throw ConfigError("MCS table: thresholds and efficiencies must be non-empty and equal length");
  }
  for (std::size_t i = 1; i < thresholds_db.size(); ++i) {
    if (!(thresholds_db[i] > thresholds_db[i - 1]) || !(efficiencies[i] > efficiencies[i - 1])) {
      throw ConfigError("MCS table: entries must be strictly increasing");
    }
  }
}

double mcs_rate_db(double sinr_db, const McsTable& mcs) {
  const auto it = std::upper_bound(mcs.thresholds_db.begin(), mcs.thresholds_db.end(), sinr_db);
  if (it == mcs.thresholds_db.begin()) return 0.0;
  const auto level = static_cast<std::size_t>(it - mcs.thresholds_db.begin()) - 1;
  return mcs.symbol_rate() * mcs.efficiencies[level];
}

double mcs_rate(double sinr, const McsTable& mcs) {
  if (!(sinr > 0.0)) return 0.0;
  return mcs_rate_db(linear_to_db(sinr), mcs);
}

std::vector<VirtualBs> expand_virtual(const Scenario& scenario, const RaScheme& ra) {
  const auto& cfg = scenario.config;
  const std::size_t m = cfg.total_subchannels_per_macro;
  ra.validate(m);
  const double pm = cfg.p_macro_w();
  const double pp = cfg.p_small_w();
  const std::size_t k = ra.k.value_or(0);

  std::vector<VirtualBs> out;
  auto add = [&](const BaseStation& bs, Band band, std::size_t channels, double budget_w) {
    VirtualBs v;
    v.id = out.size();
    v.physical_bs = bs.id;
    v.kind = bs.kind;
    v.color = bs.color;
    v.band = band;
    v.channels = channels;
    v.power_per_channel_w = budget_w / static_cast<double>(channels);
    out.push_back(std::move(v));
  };

  for (const auto& bs : scenario.layout.base_stations) {
    const bool macro = bs.kind == BsKind::macro;
    switch (ra.kind) {
      case RaKind::ccd:
        add(bs, Band::full, m, macro ? pm : pp);
        break;
      case RaKind::od:
        if (macro) add(bs, Band::dedicated, m - k, pm);
        else add(bs, Band::shared, k, pp);
        break;
      case RaKind::psd:
        if (macro) {
          add(bs, Band::shared, k, pp);
          add(bs, Band::dedicated, m - k, pm - pp);
        } else {
          add(bs, Band::shared, k, pp);
        }
        break;
    }
  }

  for (auto& v : out) {
    for (const auto& h : out) {
      if (h.id != v.id && h.color == v.color && bands_overlap(h.band, v.band)) v.interferers.push_back(h.id);
    }
  }
  return out;
}

std::vector<double> compute_sinr(const Scenario& scenario, const std::vector<VirtualBs>& virtuals) {
  const std::size_t l = scenario.layout.locations.size();
  const std::size_t n = virtuals.size();
  const double noise = scenario.config.noise_per_channel_w();
  std::vector<double> sinr(l * n);
  std::vector<double> received(n);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      received[j] = virtuals[j].power_per_channel_w * scenario.gains.gain_linear(i, virtuals[j].physical_bs);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double interference = 0.0;
      for (const auto h : virtuals[j].interferers) interference += received[h];
      sinr[i * n + j] = received[j] / (noise + interference);
    }
  }
  return sinr;
}

LinkTable build_link_table(const Scenario& scenario, const RaScheme& ra, const McsTable& mcs) {
  mcs.validate();
  LinkTable t;
  t.location_count = scenario.layout.locations.size();
  t.virtuals = expand_virtual(scenario, ra);
  t.sinr = compute_sinr(scenario, t.virtuals);
  t.rate.resize(t.sinr.size());
  std::transform(t.sinr.begin(), t.sinr.end(), t.rate.begin(), [&](double s) { return mcs_rate(s, mcs); });
  return t;
}

}  // namespace hetnet
