#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lidc/corpus.hpp"
#include "lidc/sparse.hpp"

namespace lidc {

enum class FeatureKind { kChar, kWord, kSkip };

// Gap convention for word skip bigrams: kUpTo pairs tokens with 0..k
// intervening tokens, kExact only with exactly k.
enum class SkipMode { kUpTo, kExact };

/// One feature family: char n-grams (n in 1..8), word n-grams (n in 1..3)
/// or word k-skip bigrams (k in 1..3). Construction validates the range.
class FeatureSpec {
 public:
  static FeatureSpec char_ngram(int n);
  static FeatureSpec word_ngram(int n);
  static FeatureSpec skip_bigram(int k, SkipMode mode = SkipMode::kUpTo);

  /// Parses `char:N`, `word:N`, `skip:K`; `skip:K:exact` selects the
  /// exact-gap convention.
  static FeatureSpec parse(std::string_view text);
  static std::vector<FeatureSpec> parse_list(std::string_view comma_separated);

  /// All fourteen families: char 1..8, word 1..3, skip 1..3.
  static std::vector<FeatureSpec> full_grid();

  FeatureKind kind() const { return kind_; }
  int order() const { return order_; }
  SkipMode skip_mode() const { return skip_mode_; }
  std::string to_string() const;

  bool operator==(const FeatureSpec&) const = default;

 private:
  FeatureSpec(FeatureKind kind, int order, SkipMode mode)
      : kind_(kind), order_(order), skip_mode_(mode) {}

  FeatureKind kind_;
  int order_;
  SkipMode skip_mode_;
};

std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> char_ngrams(std::string_view text, int n);
std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, int n);
std::vector<std::string> skip_bigrams(const std::vector<std::string>& tokens, int k,
                                      SkipMode mode = SkipMode::kUpTo);

/// Multiset of terms of the given family, in extraction order.
std::vector<std::string> extract_terms(std::string_view text, const FeatureSpec& spec);

/// Term dictionary with document frequencies. Indices 0..V-1 follow
/// ascending code-point order of the terms.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Terms must be strictly ascending; df values in [1, n_docs].
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> df, std::uint64_t n_docs);

  std::size_t size() const { return terms_.size(); }
  std::uint64_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& df() const { return df_; }
  std::optional<FeatureIndex> index_of(std::string_view term) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::uint64_t n_docs_ = 0;
  std::unordered_map<std::string, FeatureIndex, Hash, std::equal_to<>> index_;
};

struct TfIdfOptions {
  // Terms occurring in fewer documents are dropped.
  std::uint32_t min_df = 1;
  unsigned threads = 1;
};

/// Raw-count tf times smoothed idf ln((1+N)/(1+df))+1, L2 normalized.
class TfIdfModel {
 public:
  TfIdfModel(FeatureSpec spec, Vocabulary vocab);
  /// Uses stored idf weights (as read from a model file) instead of
  /// recomputing them; they must agree with the vocabulary's df counts.
  TfIdfModel(FeatureSpec spec, Vocabulary vocab, std::vector<double> idf);

  const FeatureSpec& spec() const { return spec_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t dimension() const { return vocab_.size(); }

  SparseVector transform(std::string_view text) const;

 private:
  FeatureSpec spec_;
  Vocabulary vocab_;
  std::vector<double> idf_;
};

double smooth_idf(std::uint64_t n_docs, std::uint32_t df);

TfIdfModel fit_tfidf(const std::vector<std::string>& texts, const FeatureSpec& spec,
                     const TfIdfOptions& options = {});
TfIdfModel fit_tfidf(const Dataset& corpus, const FeatureSpec& spec,
                     const TfIdfOptions& options = {});

std::vector<SparseVector> transform_all(const TfIdfModel& model,
                                        const std::vector<std::string>& texts,
                                        unsigned threads = 1);

}  // namespace lidc
