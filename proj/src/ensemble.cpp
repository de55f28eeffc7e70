#include "lidc/ensemble.hpp"

#include <algorithm>
#include <chrono>

#include "lidc/error.hpp"
#include "lidc/parallel.hpp"

namespace lidc {

LabelId Member::predict(std::string_view preprocessed_text) const {
  return model.predict(tfidf.transform(preprocessed_text));
}

Ensemble::Ensemble(LabelCatalog catalog, std::vector<Member> members, Preprocess preprocess,
                   Provenance provenance)
    : catalog_(std::move(catalog)),
      members_(std::move(members)),
      preprocess_(preprocess),
      provenance_(std::move(provenance)) {
  if (members_.empty()) throw ModelError("ensemble needs at least one member");
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const auto& member = members_[m];
    if (!(member.model.catalog() == catalog_)) {
      throw ModelError("member " + std::to_string(m) + " uses a different label catalog");
    }
    if (member.model.dimension() != member.tfidf.dimension()) {
      throw ModelError("member " + std::to_string(m) + ": model dimension " +
                       std::to_string(member.model.dimension()) + " != vocabulary size " +
                       std::to_string(member.tfidf.dimension()));
    }
  }
}

std::vector<LabelId> Ensemble::member_predictions(std::string_view text) const {
  const std::string prepared = preprocess_.apply(text);
  std::vector<LabelId> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.predict(prepared));
  return out;
}

LabelId Ensemble::predict(std::string_view text) const {
  return vote(member_predictions(text), catalog_.size());
}

LabelId vote(std::span<const LabelId> predictions, std::size_t label_count) {
  if (predictions.empty()) throw DataError("vote over an empty prediction list");
  std::vector<std::size_t> counts(label_count, 0);
  for (LabelId p : predictions) {
    if (p >= label_count) {
      throw DataError("vote: label " + std::to_string(p) + " outside catalog of size " +
                      std::to_string(label_count));
    }
    ++counts[p];
  }
  // max_element returns the first maximum, i.e. the lowest label among ties.
  return static_cast<LabelId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<LabelId> vote_columns(const std::vector<std::vector<LabelId>>& member_predictions,
                                  std::size_t label_count) {
  if (member_predictions.empty()) throw DataError("vote over zero members");
  const std::size_t n = member_predictions.front().size();
  for (const auto& col : member_predictions) {
    if (col.size() != n) throw DataError("member prediction columns differ in length");
  }
  std::vector<LabelId> out(n);
  std::vector<LabelId> row(member_predictions.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < member_predictions.size(); ++m) row[m] = member_predictions[m][i];
    out[i] = vote(row, label_count);
  }
  return out;
}

LabelId predict_document(const Ensemble& ens, const Document& doc) {
  return ens.predict(doc.text);
}

std::vector<LabelId> predict_all(const Ensemble& ens, const std::vector<std::string>& texts,
                                 unsigned threads) {
  std::vector<LabelId> out(texts.size());
  parallel_chunks(texts.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) out[i] = ens.predict(texts[i]);
  });
  return out;
}

void check_member_specs(std::span<const FeatureSpec> specs) {
  if (specs.empty()) throw ConfigError("ensemble needs at least one feature spec");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (specs[i] == specs[j]) {
        throw ConfigError("duplicate feature spec " + specs[i].to_string());
      }
    }
  }
}

Ensemble train_ensemble(const Dataset& train, std::span<const FeatureSpec> specs,
                        const TrainConfig& cfg, const EnsembleOptions& options,
                        std::vector<MemberSummary>* summary) {
  check_member_specs(specs);
  cfg.validate();
  if (train.empty()) throw DataError("training set is empty");
  const std::vector<LabelId> labels = train.labels();

  std::vector<std::string> texts;
  texts.reserve(train.size());
  for (const auto& d : train.documents) texts.push_back(options.preprocess.apply(d.text));

  const unsigned threads = std::max(1u, options.threads);
  std::vector<Member> members;
  members.reserve(specs.size());
  for (const auto& spec : specs) {
    const auto start = std::chrono::steady_clock::now();
    TfIdfModel tfidf = fit_tfidf(texts, spec, {options.min_df, threads});
    const auto X = transform_all(tfidf, texts, threads);
    MulticlassSummary ms;
    LinearModel model =
        train_multiclass(X, labels, train.catalog, tfidf.dimension(), cfg, threads, &ms);
    if (summary) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      summary->push_back({spec.to_string(), tfidf.dimension(), ms.epochs, elapsed.count()});
    }
    members.push_back({std::move(tfidf), std::move(model)});
  }
  return Ensemble(train.catalog, std::move(members), options.preprocess,
                  {cfg.shuffle_seed, train.source_digest});
}

}  // namespace lidc
