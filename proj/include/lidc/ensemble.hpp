#pragma once

#include <span>
#include <string>
#include <vector>

#include "lidc/corpus.hpp"
#include "lidc/features.hpp"
#include "lidc/svm.hpp"

namespace lidc {

/// One voter: a TF-IDF pipeline for a single feature family and the
/// one-vs-rest model trained on its output.
struct Member {
  TfIdfModel tfidf;
  LinearModel model;

  const FeatureSpec& spec() const { return tfidf.spec(); }
  LabelId predict(std::string_view preprocessed_text) const;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string training_digest;
};

/// Hard-majority ensemble. Every member carries exactly one vote; there is
/// no weight field.
class Ensemble {
 public:
  Ensemble(LabelCatalog catalog, std::vector<Member> members, Preprocess preprocess = {},
           Provenance provenance = {});

  const LabelCatalog& catalog() const { return catalog_; }
  const std::vector<Member>& members() const { return members_; }
  const Preprocess& preprocess() const { return preprocess_; }
  const Provenance& provenance() const { return provenance_; }

  std::vector<LabelId> member_predictions(std::string_view text) const;
  LabelId predict(std::string_view text) const;

 private:
  LabelCatalog catalog_;
  std::vector<Member> members_;
  Preprocess preprocess_;
  Provenance provenance_;
};

/// Label with the most votes; among tied counts the smallest LabelId.
LabelId vote(std::span<const LabelId> predictions, std::size_t label_count);

/// Row-wise vote over per-member prediction columns of equal length.
std::vector<LabelId> vote_columns(const std::vector<std::vector<LabelId>>& member_predictions,
                                  std::size_t label_count);

LabelId predict_document(const Ensemble& ens, const Document& doc);
std::vector<LabelId> predict_all(const Ensemble& ens, const std::vector<std::string>& texts,
                                 unsigned threads = 1);

struct EnsembleOptions {
  Preprocess preprocess;
  std::uint32_t min_df = 1;
  unsigned threads = 1;
};

struct MemberSummary {
  std::string spec;
  std::size_t vocabulary_size = 0;
  std::vector<int> epochs;
  double seconds = 0.0;
};

/// Rejects empty or duplicated spec lists.
void check_member_specs(std::span<const FeatureSpec> specs);

Ensemble train_ensemble(const Dataset& train, std::span<const FeatureSpec> specs,
                        const TrainConfig& cfg, const EnsembleOptions& options = {},
                        std::vector<MemberSummary>* summary = nullptr);

}  // namespace lidc
