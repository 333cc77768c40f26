#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "hetnet/io.hpp"
#include "hetnet/sweep.hpp"

namespace hetnet {

/// Figure ids: 2 (lambda_max vs K, homogeneous), 3 (same, hot spots),
/// 4 (PSD max delay vs lambda), 6 (PSD average delay and its lower bound).
inline const std::set<int> kAllFigures{2, 3, 4, 6};

struct FigureOutput {
  int id = 0;
  std::string file;  // CSV file name
  std::vector<SweepRow> rows;
  std::vector<CurvePoint> best;  // best over K (and beta) per curve
};

struct TrendCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproduceResult {
  std::vector<FigureOutput> figures;
  std::vector<TrendCheck> trends;
  std::vector<std::uint64_t> seeds;
  std::vector<double> lambdas;  // delay-figure grid
};

ReproduceResult reproduce(const RunConfig& config, const std::set<int>& figures);

/// Trend assertions over the figures present in `result`.
std::vector<TrendCheck> check_trends(const ReproduceResult& result, const ExperimentConfig& experiment);

/// Writes fig<N>.csv, fig<N>_best.csv, trends.csv and manifest.json into `dir`.
/// Output bytes depend only on the config and the figure set.
void write_reproduction(const ReproduceResult& result, const RunConfig& config, const std::filesystem::path& dir);

}  // namespace hetnet
