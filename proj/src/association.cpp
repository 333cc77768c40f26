#include "hetnet/association.hpp"

#include <string>
#include <tuple>

#include "hetnet/errors.hpp"

namespace hetnet {

namespace {

[[noreturn]] void uncovered(std::size_t loc) {
  throw CoverageError(loc, "location " + std::to_string(loc) + " has no base station with a positive rate");
}

std::size_t best_sinr_at(const LinkTable& link, std::size_t i) {
  const std::size_t n = link.vbs_count();
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (link.sinr_at(i, j) > link.sinr_at(i, best)) best = j;
  }
  if (n == 0 || !(link.rate_at(i, best) > 0.0)) uncovered(i);
  return best;
}

}  // namespace

std::string_view to_string(UaRule rule) {
  switch (rule) {
    case UaRule::best_sinr: return "best-sinr";
    case UaRule::range_extension: return "re";
    case UaRule::small_cell_first: return "scf";
  }
  return "?";
}

UaRule parse_ua_rule(std::string_view text) {
  if (text == "best-sinr") return UaRule::best_sinr;
  if (text == "re") return UaRule::range_extension;
  if (text == "scf") return UaRule::small_cell_first;
  throw ConfigError("unknown association rule '" + std::string(text) + "'");
}

Association best_sinr(const LinkTable& link) {
  Association a;
  a.target.resize(link.location_count);
  for (std::size_t i = 0; i < link.location_count; ++i) a.target[i] = best_sinr_at(link, i);
  return a;
}

Association range_extension(const Scenario& scenario, const LinkTable& link, PsdMacroBand psd_band) {
  const Band preferred = psd_band == PsdMacroBand::dedicated ? Band::dedicated : Band::shared;
  Association a;
  a.target.resize(link.location_count);
  for (std::size_t i = 0; i < link.location_count; ++i) {
    bool found = false;
    std::tuple<double, std::size_t, int> best_key{};
    for (std::size_t j = 0; j < link.vbs_count(); ++j) {
      if (!(link.rate_at(i, j) > 0.0)) continue;
      const auto& v = link.virtuals[j];
      const int band_rank = (v.kind == BsKind::macro && v.band != Band::full && v.band != preferred) ? 1 : 0;
      const std::tuple<double, std::size_t, int> key{scenario.gains.path_loss(i, v.physical_bs), v.physical_bs,
                                                     band_rank};
      if (!found || key < best_key) {
        best_key = key;
        a.target[i] = j;
        found = true;
      }
    }
    if (!found) uncovered(i);
  }
  return a;
}

Association small_cell_first(const LinkTable& link, double beta_db) {
  Association a;
  a.target.resize(link.location_count);
  for (std::size_t i = 0; i < link.location_count; ++i) {
    bool have_small = false;
    std::size_t best_small = 0;
    for (std::size_t j = 0; j < link.vbs_count(); ++j) {
      if (link.virtuals[j].kind != BsKind::small) continue;
      if (!have_small || link.sinr_at(i, j) > link.sinr_at(i, best_small)) {
        best_small = j;
        have_small = true;
      }
    }
    if (have_small && link.rate_at(i, best_small) > 0.0 && linear_to_db(link.sinr_at(i, best_small)) > beta_db) {
      a.target[i] = best_small;
    } else {
      a.target[i] = best_sinr_at(link, i);
    }
  }
  return a;
}

void check_association(const Association& assoc, const LinkTable& link) {
  if (assoc.target.size() != link.location_count) {
    throw std::invalid_argument("association covers " + std::to_string(assoc.target.size()) + " locations, expected " +
                                std::to_string(link.location_count));
  }
  for (std::size_t i = 0; i < assoc.target.size(); ++i) {
    if (assoc.target[i] >= link.vbs_count() || !(link.rate_at(i, assoc.target[i]) > 0.0)) uncovered(i);
  }
}

}  // namespace hetnet
