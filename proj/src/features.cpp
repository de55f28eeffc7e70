#include "lidc/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lidc/error.hpp"
#include "lidc/parallel.hpp"
#include "lidc/unicode.hpp"

namespace lidc {

namespace {

void check_range(std::string_view family, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw ConfigError(std::string(family) + " order " + std::to_string(value) +
                      " out of range; valid range is " + std::to_string(lo) + ".." +
                      std::to_string(hi));
  }
}

}  // namespace

// ---------------------------------------------------------------- SparseVector

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) s += dense[indices[k]] * values[k];
  return s;
}

void SparseVector::axpy(double scale, std::span<double> dense) const {
  for (std::size_t k = 0; k < indices.size(); ++k) dense[indices[k]] += scale * values[k];
}

// ---------------------------------------------------------------- FeatureSpec

FeatureSpec FeatureSpec::char_ngram(int n) {
  check_range("char n-gram", n, 1, 8);
  return {FeatureKind::kChar, n, SkipMode::kUpTo};
}

FeatureSpec FeatureSpec::word_ngram(int n) {
  check_range("word n-gram", n, 1, 3);
  return {FeatureKind::kWord, n, SkipMode::kUpTo};
}

FeatureSpec FeatureSpec::skip_bigram(int k, SkipMode mode) {
  check_range("skip bigram", k, 1, 3);
  return {FeatureKind::kSkip, k, mode};
}

FeatureSpec FeatureSpec::parse(std::string_view text) {
  auto fail = [&]() -> FeatureSpec {
    throw ConfigError("malformed feature spec '" + std::string(text) +
                      "' (expected char:N with N in 1..8, word:N with N in 1..3, or "
                      "skip:K with K in 1..3)");
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return fail();
  const std::string_view family = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  std::string_view suffix;
  if (auto second = std::find(rest.begin(), rest.end(), ':'); second != rest.end()) {
    const auto at = static_cast<std::size_t>(second - rest.begin());
    suffix = rest.substr(at + 1);
    rest = rest.substr(0, at);
  }
  if (rest.empty() || rest.size() > 3 ||
      !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return fail();
  }
  const int value = std::stoi(std::string(rest));
  if (family == "skip") {
    if (suffix.empty() || suffix == "upto") return skip_bigram(value, SkipMode::kUpTo);
    if (suffix == "exact") return skip_bigram(value, SkipMode::kExact);
    return fail();
  }
  if (!suffix.empty()) return fail();
  if (family == "char") return char_ngram(value);
  if (family == "word") return word_ngram(value);
  return fail();
}

std::vector<FeatureSpec> FeatureSpec::parse_list(std::string_view comma_separated) {
  std::vector<FeatureSpec> out;
  std::size_t pos = 0;
  while (pos <= comma_separated.size()) {
    std::size_t end = comma_separated.find(',', pos);
    if (end == std::string_view::npos) end = comma_separated.size();
    std::string_view item = comma_separated.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw ConfigError("empty entry in feature list '" + std::string(comma_separated) + "'");
    out.push_back(parse(item));
    pos = end + 1;
  }
  return out;
}

std::vector<FeatureSpec> FeatureSpec::full_grid() {
  std::vector<FeatureSpec> out;
  for (int n = 1; n <= 8; ++n) out.push_back(char_ngram(n));
  for (int n = 1; n <= 3; ++n) out.push_back(word_ngram(n));
  for (int k = 1; k <= 3; ++k) out.push_back(skip_bigram(k));
  return out;
}

std::string FeatureSpec::to_string() const {
  switch (kind_) {
    case FeatureKind::kChar: return "char:" + std::to_string(order_);
    case FeatureKind::kWord: return "word:" + std::to_string(order_);
    case FeatureKind::kSkip:
      return "skip:" + std::to_string(order_) + (skip_mode_ == SkipMode::kExact ? ":exact" : "");
  }
  return {};
}

// ---------------------------------------------------------------- extraction

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const auto offsets = unicode::code_point_offsets(text);
  const auto cps = unicode::decode(text);
  std::size_t start = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (unicode::is_whitespace(cps[i])) {
      if (in_token) tokens.emplace_back(text.substr(start, offsets[i] - start));
      in_token = false;
    } else if (!in_token) {
      start = offsets[i];
      in_token = true;
    }
  }
  if (in_token) tokens.emplace_back(text.substr(start));
  return tokens;
}

std::vector<std::string> char_ngrams(std::string_view text, int n) {
  check_range("char n-gram", n, 1, 8);
  const auto offsets = unicode::code_point_offsets(text);
  const std::size_t chars = offsets.size() - 1;
  const auto width = static_cast<std::size_t>(n);
  std::vector<std::string> out;
  if (chars < width) return out;
  out.reserve(chars - width + 1);
  for (std::size_t i = 0; i + width <= chars; ++i) {
    out.emplace_back(text.substr(offsets[i], offsets[i + width] - offsets[i]));
  }
  return out;
}

std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, int n) {
  check_range("word n-gram", n, 1, 3);
  const auto width = static_cast<std::size_t>(n);
  std::vector<std::string> out;
  if (tokens.size() < width) return out;
  out.reserve(tokens.size() - width + 1);
  for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
    std::string term = tokens[i];
    for (std::size_t j = 1; j < width; ++j) {
      term.push_back(' ');
      term += tokens[i + j];
    }
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<std::string> skip_bigrams(const std::vector<std::string>& tokens, int k,
                                      SkipMode mode) {
  check_range("skip bigram", k, 1, 3);
  const auto max_gap = static_cast<std::size_t>(k) + 1;
  const std::size_t min_gap = mode == SkipMode::kExact ? max_gap : 1;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t gap = min_gap; gap <= max_gap && i + gap < tokens.size(); ++gap) {
      std::string term = tokens[i];
      term.push_back(' ');
      term += tokens[i + gap];
      out.push_back(std::move(term));
    }
  }
  return out;
}

std::vector<std::string> extract_terms(std::string_view text, const FeatureSpec& spec) {
  switch (spec.kind()) {
    case FeatureKind::kChar: return char_ngrams(text, spec.order());
    case FeatureKind::kWord: return word_ngrams(tokenize(text), spec.order());
    case FeatureKind::kSkip: return skip_bigrams(tokenize(text), spec.order(), spec.skip_mode());
  }
  return {};
}

// ---------------------------------------------------------------- Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> df,
                       std::uint64_t n_docs)
    : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
  if (terms_.size() != df_.size()) throw DataError("vocabulary: term/df length mismatch");
  if (terms_.size() > std::numeric_limits<FeatureIndex>::max()) {
    throw DataError("vocabulary too large");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw DataError("vocabulary terms not strictly ascending at index " + std::to_string(i));
    }
    if (df_[i] < 1 || df_[i] > n_docs_) {
      throw DataError("vocabulary df out of range for term at index " + std::to_string(i));
    }
    index_.emplace(terms_[i], static_cast<FeatureIndex>(i));
  }
}

std::optional<FeatureIndex> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- TF-IDF

double smooth_idf(std::uint64_t n_docs, std::uint32_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

TfIdfModel::TfIdfModel(FeatureSpec spec, Vocabulary vocab)
    : spec_(spec), vocab_(std::move(vocab)) {
  idf_.reserve(vocab_.size());
  for (std::uint32_t df : vocab_.df()) idf_.push_back(smooth_idf(vocab_.n_docs(), df));
}

TfIdfModel::TfIdfModel(FeatureSpec spec, Vocabulary vocab, std::vector<double> idf)
    : spec_(spec), vocab_(std::move(vocab)), idf_(std::move(idf)) {
  if (idf_.size() != vocab_.size()) {
    throw DataError("idf length " + std::to_string(idf_.size()) + " != vocabulary size " +
                    std::to_string(vocab_.size()));
  }
  for (std::size_t i = 0; i < idf_.size(); ++i) {
    const double expected = smooth_idf(vocab_.n_docs(), vocab_.df()[i]);
    if (!std::isfinite(idf_[i]) || std::fabs(idf_[i] - expected) > 1e-12 * expected) {
      throw DataError("idf at index " + std::to_string(i) + " inconsistent with its df");
    }
  }
}

SparseVector TfIdfModel::transform(std::string_view text) const {
  std::vector<FeatureIndex> hits;
  for (const auto& term : extract_terms(text, spec_)) {
    if (auto idx = vocab_.index_of(term)) hits.push_back(*idx);
  }
  std::sort(hits.begin(), hits.end());

  SparseVector x;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    x.indices.push_back(hits[i]);
    x.values.push_back(static_cast<double>(j - i) * idf_[hits[i]]);
    i = j;
  }
  const double norm = std::sqrt(x.squared_norm());
  if (norm > 0.0) {
    for (double& v : x.values) v /= norm;
  }
  return x;
}

TfIdfModel fit_tfidf(const std::vector<std::string>& texts, const FeatureSpec& spec,
                     const TfIdfOptions& options) {
  if (texts.empty()) throw DataError("cannot fit TF-IDF on an empty corpus");

  using Counts = std::unordered_map<std::string, std::uint32_t>;
  const unsigned threads = std::max(1u, options.threads);
  std::vector<Counts> partial(threads);
  parallel_chunks(texts.size(), threads, [&](std::size_t begin, std::size_t end, unsigned c) {
    Counts& counts = partial[c];
    for (std::size_t d = begin; d < end; ++d) {
      auto terms = extract_terms(texts[d], spec);
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
      for (auto& t : terms) ++counts[std::move(t)];
    }
  });

  Counts merged = std::move(partial[0]);
  for (std::size_t c = 1; c < partial.size(); ++c) {
    for (auto& [term, df] : partial[c]) merged[term] += df;
    Counts().swap(partial[c]);
  }

  std::vector<std::pair<std::string, std::uint32_t>> entries;
  entries.reserve(merged.size());
  for (auto& [term, df] : merged) {
    if (df >= options.min_df) entries.emplace_back(term, df);
  }
  Counts().swap(merged);
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  terms.reserve(entries.size());
  df.reserve(entries.size());
  for (auto& [term, count] : entries) {
    terms.push_back(std::move(term));
    df.push_back(count);
  }
  return TfIdfModel(spec, Vocabulary(std::move(terms), std::move(df), texts.size()));
}

TfIdfModel fit_tfidf(const Dataset& corpus, const FeatureSpec& spec, const TfIdfOptions& options) {
  return fit_tfidf(corpus.texts(), spec, options);
}

std::vector<SparseVector> transform_all(const TfIdfModel& model,
                                        const std::vector<std::string>& texts, unsigned threads) {
  std::vector<SparseVector> out(texts.size());
  parallel_chunks(texts.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) out[i] = model.transform(texts[i]);
  });
  return out;
}

}  // namespace lidc
