#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lidc/corpus.hpp"

namespace lidc {

/// Gold-by-predicted count table (rows gold, columns predicted).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t label_count);

  std::size_t label_count() const { return label_count_; }
  std::uint64_t at(LabelId gold, LabelId predicted) const;
  void add(LabelId gold, LabelId predicted, std::uint64_t count = 1);
  std::uint64_t total() const;
  std::uint64_t row_sum(LabelId gold) const;
  std::uint64_t column_sum(LabelId predicted) const;
  std::uint64_t trace() const;

 private:
  std::size_t label_count_;
  std::vector<std::uint64_t> counts_;
};

struct LabelScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct ScoreReport {
  std::vector<LabelScore> per_label;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::uint64_t total = 0;
};

ConfusionMatrix confusion(std::span<const LabelId> gold, std::span<const LabelId> predicted,
                          std::size_t label_count);

/// Per-label P/R/F1 with 0 for every 0/0, plus macro, weighted and accuracy.
ScoreReport score(const ConfusionMatrix& cm);

std::vector<LabelId> random_predictions(std::size_t n, std::size_t label_count, std::uint64_t seed);

/// Uniform random guessing over label_count labels with a seeded generator.
ScoreReport random_baseline(std::span<const LabelId> gold, std::size_t label_count,
                            std::uint64_t seed);

struct MisclassifiedInstance {
  std::size_t index = 0;  // position in the dataset
  std::string text;
  LabelId gold = 0;
  LabelId predicted = 0;
  std::size_t tokens = 0;
  bool is_short = false;
};

struct ConfusedPair {
  LabelId gold = 0;
  LabelId predicted = 0;
  std::uint64_t count = 0;
};

struct ErrorReport {
  std::vector<MisclassifiedInstance> errors;
  std::size_t evaluated = 0;
  std::size_t short_errors = 0;
  double short_fraction = 0.0;
  // Off-diagonal cells by descending count, ties by (gold, predicted).
  std::vector<ConfusedPair> top_pairs;
};

ErrorReport error_report(const Dataset& dataset, std::span<const LabelId> predicted,
                         std::size_t short_threshold = 3);

std::string confusion_csv(const ConfusionMatrix& cm, const LabelCatalog& catalog);
std::string confusion_svg(const ConfusionMatrix& cm, const LabelCatalog& catalog);
std::string score_json(const ScoreReport& report, const LabelCatalog& catalog);
std::string error_report_tsv(const ErrorReport& report, const LabelCatalog& catalog);

}  // namespace lidc
