#include "lidc/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "lidc/error.hpp"
#include "lidc/log.hpp"
#include "lidc/metrics.hpp"

namespace lidc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> preprocess_all(const Dataset& ds, const Preprocess& p) {
  std::vector<std::string> out;
  out.reserve(ds.size());
  for (const auto& d : ds.documents) out.push_back(p.apply(d.text));
  return out;
}

// Shared state for one tuning run: preprocessed splits, gold labels, and the
// TF-IDF representation of each feature family (independent of C).
class Bench {
 public:
  Bench(const Dataset& train, const Dataset& dev, const EnsembleOptions& options)
      : train_(train), options_(options), threads_(std::max(1u, options.threads)) {
    if (train.empty()) throw DataError("training set is empty");
    if (dev.empty()) throw DataError("development set is empty");
    train_labels_ = train.labels();
    dev_gold_ = remap_labels(dev, train.catalog);
    train_texts_ = preprocess_all(train, options.preprocess);
    dev_texts_ = preprocess_all(dev, options.preprocess);
  }

  // Dev-set predictions of a single member trained with cfg.
  const std::vector<LabelId>& member_predictions(const FeatureSpec& spec, const TrainConfig& cfg) {
    const std::pair<std::string, double> key{spec.to_string(), cfg.C};
    if (auto it = predictions_.find(key); it != predictions_.end()) return it->second;

    const Features& f = features(spec);
    LinearModel model = train_multiclass(f.train, train_labels_, train_.catalog,
                                         f.dimension, cfg, threads_);
    std::vector<LabelId> preds(f.dev.size());
    for (std::size_t i = 0; i < f.dev.size(); ++i) preds[i] = model.predict(f.dev[i]);
    return predictions_.emplace(key, std::move(preds)).first->second;
  }

  GridRecord evaluate(std::span<const FeatureSpec> specs, const TrainConfig& cfg) {
    const auto start = Clock::now();
    std::vector<std::vector<LabelId>> columns;
    GridRecord rec;
    for (const auto& s : specs) {
      columns.push_back(member_predictions(s, cfg));
      rec.specs.push_back(s.to_string());
    }
    const auto voted = vote_columns(columns, train_.catalog.size());
    const ScoreReport report = score(confusion(dev_gold_, voted, train_.catalog.size()));
    rec.C = cfg.C;
    rec.macro_f1 = report.macro_f1;
    rec.weighted_f1 = report.weighted_f1;
    rec.seconds = seconds_since(start);
    return rec;
  }

 private:
  struct Features {
    std::size_t dimension = 0;
    std::vector<SparseVector> train;
    std::vector<SparseVector> dev;
  };

  const Features& features(const FeatureSpec& spec) {
    const std::string key = spec.to_string();
    if (auto it = features_.find(key); it != features_.end()) return it->second;
    TfIdfModel tfidf = fit_tfidf(train_texts_, spec, {options_.min_df, threads_});
    Features f;
    f.dimension = tfidf.dimension();
    f.train = transform_all(tfidf, train_texts_, threads_);
    f.dev = transform_all(tfidf, dev_texts_, threads_);
    return features_.emplace(key, std::move(f)).first->second;
  }

  const Dataset& train_;
  EnsembleOptions options_;
  unsigned threads_;
  std::vector<LabelId> train_labels_;
  std::vector<LabelId> dev_gold_;
  std::vector<std::string> train_texts_;
  std::vector<std::string> dev_texts_;
  std::map<std::string, Features> features_;
  std::map<std::pair<std::string, double>, std::vector<LabelId>> predictions_;
};

void log_record(const GridRecord& r) {
  std::ostringstream msg;
  msg << "evaluated [";
  for (std::size_t i = 0; i < r.specs.size(); ++i) msg << (i ? "," : "") << r.specs[i];
  msg << "] C=" << r.C << " macro-F1=" << r.macro_f1 << " weighted-F1=" << r.weighted_f1;
  log::info(msg.str());
}

}  // namespace

std::vector<double> default_c_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

std::size_t select_best_c(std::span<const GridRecord> records) {
  if (records.empty()) throw ConfigError("no configurations to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& b = records[best];
    if (r.macro_f1 > b.macro_f1 || (r.macro_f1 == b.macro_f1 && r.C < b.C)) best = i;
  }
  return best;
}

std::size_t select_best_combination(std::span<const GridRecord> records) {
  if (records.empty()) throw ConfigError("no configurations to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& b = records[best];
    if (r.macro_f1 != b.macro_f1) {
      if (r.macro_f1 > b.macro_f1) best = i;
    } else if (r.specs.size() != b.specs.size()) {
      if (r.specs.size() < b.specs.size()) best = i;
    } else if (r.specs < b.specs) {
      best = i;
    }
  }
  return best;
}

GridResult grid_search_c(const Dataset& train, const Dataset& dev,
                         std::span<const FeatureSpec> specs, std::span<const double> c_grid,
                         const TrainConfig& base, const EnsembleOptions& options) {
  if (c_grid.empty()) throw ConfigError("empty C grid");
  check_member_specs(specs);
  for (double c : c_grid) {
    TrainConfig probe = base;
    probe.C = c;
    probe.validate();
  }
  Bench bench(train, dev, options);
  GridResult result;
  for (double c : c_grid) {
    TrainConfig cfg = base;
    cfg.C = c;
    result.records.push_back(bench.evaluate(specs, cfg));
    log_record(result.records.back());
  }
  result.best = select_best_c(result.records);
  return result;
}

GridResult search_combinations(const Dataset& train, const Dataset& dev,
                               const std::vector<std::vector<FeatureSpec>>& candidates,
                               const TrainConfig& cfg, const EnsembleOptions& options) {
  if (candidates.empty()) throw ConfigError("no candidate feature combinations");
  for (const auto& c : candidates) check_member_specs(c);
  cfg.validate();
  Bench bench(train, dev, options);
  GridResult result;
  for (const auto& c : candidates) {
    result.records.push_back(bench.evaluate(c, cfg));
    log_record(result.records.back());
  }
  result.best = select_best_combination(result.records);
  return result;
}

GridResult ablate_features(const Dataset& train, const Dataset& dev,
                           std::span<const FeatureSpec> specs, const TrainConfig& cfg,
                           const EnsembleOptions& options) {
  std::vector<std::vector<FeatureSpec>> singles;
  for (const auto& s : specs) singles.push_back({s});
  return search_combinations(train, dev, singles, cfg, options);
}

std::vector<std::vector<FeatureSpec>> powerset(std::span<const FeatureSpec> pool,
                                               std::size_t max_size) {
  check_member_specs(pool);
  std::vector<std::vector<FeatureSpec>> out;
  const std::size_t n = pool.size();
  for (std::size_t size = 1; size <= std::min(max_size, n); ++size) {
    // Lexicographic enumeration of index combinations.
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<FeatureSpec> combo;
      for (auto i : idx) combo.push_back(pool[i]);
      out.push_back(std::move(combo));
      std::size_t k = size;
      while (k > 0 && idx[k - 1] == n - size + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

namespace {

std::string join_specs(const std::vector<std::string>& specs) {
  std::string out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (i) out += ',';
    out += specs[i];
  }
  return out;
}

}  // namespace

std::string grid_tsv(const GridResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "index\tspecs\tC\tmacro_f1\tweighted_f1\tseconds\tbest\n";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    out << i << '\t' << join_specs(r.specs) << '\t' << r.C << '\t' << r.macro_f1 << '\t'
        << r.weighted_f1 << '\t' << r.seconds << '\t' << (i == result.best ? "*" : "") << '\n';
  }
  return out.str();
}

std::string grid_json(const GridResult& result) {
  nlohmann::json j;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) {
    records.push_back({{"specs", r.specs},
                       {"C", r.C},
                       {"macro_f1", r.macro_f1},
                       {"weighted_f1", r.weighted_f1},
                       {"seconds", r.seconds}});
  }
  j["records"] = std::move(records);
  j["best"] = result.best;
  return j.dump(2) + "\n";
}

}  // namespace lidc
