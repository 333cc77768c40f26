#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "hetnet/phy.hpp"
#include "hetnet/scenario.hpp"

namespace hetnet {

/// Location -> virtual BS map; `target[i]` is the queue serving location i.
struct Association {
  std::vector<std::size_t> target;

  bool operator==(const Association&) const = default;
};

enum class UaRule { best_sinr, range_extension, small_cell_first };
std::string_view to_string(UaRule rule);
UaRule parse_ua_rule(std::string_view text);

/// Which PSD macro band Range Extension picks when both share the path loss.
enum class PsdMacroBand { dedicated, shared };

/// Highest per-channel SINR; ties go to the lowest virtual BS id.
Association best_sinr(const LinkTable& link);

/// Minimum path loss (no shadowing, no power) among virtual BSs that cover
/// the location at a positive rate.
Association range_extension(const Scenario& scenario, const LinkTable& link,
                            PsdMacroBand psd_band = PsdMacroBand::dedicated);

/// Best small cell if its SINR exceeds `beta_db`, otherwise best SINR overall.
Association small_cell_first(const LinkTable& link, double beta_db);

inline constexpr double kBetaMinusInfinity = -std::numeric_limits<double>::infinity();

/// Checks one target per location with a positive rate; throws CoverageError.
void check_association(const Association& assoc, const LinkTable& link);

}  // namespace hetnet
