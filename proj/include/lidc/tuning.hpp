#pragma once

#include <span>
#include <string>
#include <vector>

#include "lidc/corpus.hpp"
#include "lidc/ensemble.hpp"
#include "lidc/features.hpp"
#include "lidc/svm.hpp"

namespace lidc {

struct GridRecord {
  std::vector<std::string> specs;
  double C = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double seconds = 0.0;
};

struct GridResult {
  std::vector<GridRecord> records;  // in configuration order
  std::size_t best = 0;

  const GridRecord& winner() const { return records.at(best); }
};

/// 1e-3, 1e-2, ..., 1e3.
std::vector<double> default_c_grid();

/// Highest macro-F1; ties go to the smallest C.
std::size_t select_best_c(std::span<const GridRecord> records);
/// Highest macro-F1; ties go to fewer members, then to the lexicographically
/// smaller list of spec strings.
std::size_t select_best_combination(std::span<const GridRecord> records);

GridResult grid_search_c(const Dataset& train, const Dataset& dev,
                         std::span<const FeatureSpec> specs, std::span<const double> c_grid,
                         const TrainConfig& base, const EnsembleOptions& options = {});

GridResult search_combinations(const Dataset& train, const Dataset& dev,
                               const std::vector<std::vector<FeatureSpec>>& candidates,
                               const TrainConfig& cfg, const EnsembleOptions& options = {});

/// One single-member classifier per spec, in the given order.
GridResult ablate_features(const Dataset& train, const Dataset& dev,
                           std::span<const FeatureSpec> specs, const TrainConfig& cfg,
                           const EnsembleOptions& options = {});

/// Every non-empty subset of `pool` with at most max_size members, ordered by
/// size and then by position in the pool.
std::vector<std::vector<FeatureSpec>> powerset(std::span<const FeatureSpec> pool,
                                               std::size_t max_size);

std::string grid_tsv(const GridResult& result);
std::string grid_json(const GridResult& result);

}  // namespace lidc
