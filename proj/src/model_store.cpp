#include "lidc/model_store.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "lidc/error.hpp"

namespace lidc {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatName = "lidc-ensemble";

json weights_to_json(const std::vector<double>& w) {
  const auto zeros = static_cast<std::size_t>(std::count(w.begin(), w.end(), 0.0));
  if (2 * zeros < w.size() || w.empty()) return json{{"dense", w}};
  json entries = json::array();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) entries.push_back(json::array({i, w[i]}));
  }
  return json{{"size", w.size()}, {"sparse", std::move(entries)}};
}

std::vector<double> weights_from_json(const json& j, const std::string& where) {
  if (j.contains("dense")) return j.at("dense").get<std::vector<double>>();
  const auto size = j.at("size").get<std::size_t>();
  std::vector<double> w(size, 0.0);
  std::size_t previous = 0;
  bool first = true;
  for (const auto& e : j.at("sparse")) {
    const auto i = e.at(0).get<std::size_t>();
    if (i >= size || (!first && i <= previous)) {
      throw ModelError(where + ": sparse weight indices must be ascending and < size");
    }
    w[i] = e.at(1).get<double>();
    previous = i;
    first = false;
  }
  return w;
}

json member_to_json(const Member& m) {
  const auto& vocab = m.tfidf.vocabulary();
  json terms = json::array();
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    terms.push_back(json::array({vocab.terms()[i], i, vocab.df()[i]}));
  }
  const TrainConfig& cfg = m.model.config();
  json weights = json::array();
  for (const auto& w : m.model.weights()) weights.push_back(weights_to_json(w));
  return json{
      {"spec", m.spec().to_string()},
      {"vocabulary", {{"n_docs", vocab.n_docs()}, {"terms", std::move(terms)}}},
      {"idf", m.tfidf.idf()},
      {"svm",
       {{"C", cfg.C},
        {"loss", to_string(cfg.loss)},
        {"tol", cfg.tol},
        {"max_epochs", cfg.max_epochs},
        {"shuffle_seed", cfg.shuffle_seed},
        {"fit_bias", cfg.fit_bias},
        {"bias_scale", cfg.bias_scale}}},
      {"weights", std::move(weights)},
  };
}

json to_document(const Ensemble& ens) {
  json members = json::array();
  for (const auto& m : ens.members()) members.push_back(member_to_json(m));
  return json{
      {"format", kFormatName},
      {"format_version", kModelFormatVersion},
      {"catalog", ens.catalog().labels()},
      {"preprocess",
       {{"lowercase", ens.preprocess().lowercase},
        {"strip_punctuation", ens.preprocess().strip_punctuation}}},
      {"members", std::move(members)},
      {"provenance",
       {{"seed", ens.provenance().seed},
        {"training_digest", ens.provenance().training_digest}}},
  };
}

std::string digest_of(const json& doc) {
  json copy = doc;
  copy.erase("digest");
  if (copy.contains("provenance")) copy["provenance"].erase("created");
  return sha256_hex(copy.dump());
}

Vocabulary vocabulary_from_json(const json& j, const std::string& where) {
  const auto n_docs = j.at("n_docs").get<std::uint64_t>();
  const auto& triples = j.at("terms");
  const std::size_t V = triples.size();
  std::vector<std::string> terms(V);
  std::vector<std::uint32_t> df(V);
  std::vector<bool> seen(V, false);
  for (const auto& t : triples) {
    if (!t.is_array() || t.size() != 3) {
      throw ModelError(where + ": vocabulary entries must be [term, index, df] triples");
    }
    const auto index = t.at(1).get<std::size_t>();
    if (index >= V) {
      throw ModelError(where + ": vocabulary index " + std::to_string(index) +
                       " leaves a gap (vocabulary has " + std::to_string(V) + " terms)");
    }
    if (seen[index]) {
      throw ModelError(where + ": duplicate vocabulary index " + std::to_string(index));
    }
    seen[index] = true;
    terms[index] = t.at(0).get<std::string>();
    df[index] = t.at(2).get<std::uint32_t>();
  }
  try {
    return Vocabulary(std::move(terms), std::move(df), n_docs);
  } catch (const DataError& e) {
    throw ModelError(where + ": " + e.what());
  }
}

Member member_from_json(const json& j, const LabelCatalog& catalog, std::size_t position) {
  const std::string where = "member " + std::to_string(position);
  FeatureSpec spec = FeatureSpec::char_ngram(1);
  try {
    spec = FeatureSpec::parse(j.at("spec").get<std::string>());
  } catch (const ConfigError& e) {
    throw ModelError(where + ": " + e.what());
  }
  Vocabulary vocab = vocabulary_from_json(j.at("vocabulary"), where);
  auto idf = j.at("idf").get<std::vector<double>>();
  const std::size_t dimension = vocab.size();
  std::optional<TfIdfModel> tfidf;
  try {
    tfidf.emplace(spec, std::move(vocab), std::move(idf));
  } catch (const DataError& e) {
    throw ModelError(where + ": " + e.what());
  }

  const auto& svm = j.at("svm");
  TrainConfig cfg;
  cfg.C = svm.at("C").get<double>();
  try {
    cfg.loss = parse_loss(svm.at("loss").get<std::string>());
    cfg.tol = svm.at("tol").get<double>();
    cfg.max_epochs = svm.at("max_epochs").get<int>();
    cfg.shuffle_seed = svm.at("shuffle_seed").get<std::uint64_t>();
    cfg.fit_bias = svm.at("fit_bias").get<bool>();
    cfg.bias_scale = svm.at("bias_scale").get<double>();
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ModelError(where + ": " + e.what());
  }

  std::vector<std::vector<double>> weights;
  for (const auto& w : j.at("weights")) weights.push_back(weights_from_json(w, where));
  try {
    return {std::move(*tfidf), LinearModel(catalog, dimension, cfg, std::move(weights))};
  } catch (const ModelError& e) {
    throw ModelError(where + ": " + e.what());
  }
}

Ensemble from_document(const json& doc) {
  if (!doc.is_object()) throw ModelError("model file is not a JSON object");
  if (doc.value("format", std::string()) != kFormatName) {
    throw ModelError("not an lidc model file (format field missing or wrong)");
  }
  const int version = doc.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw ModelError("unsupported format_version " + std::to_string(version) + " (expected " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  const auto labels = doc.at("catalog").get<std::vector<std::string>>();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (!(labels[i - 1] < labels[i])) {
      throw ModelError("catalog labels must be unique and in ascending order");
    }
  }
  LabelCatalog catalog(labels);

  Preprocess preprocess;
  preprocess.lowercase = doc.at("preprocess").at("lowercase").get<bool>();
  preprocess.strip_punctuation = doc.at("preprocess").at("strip_punctuation").get<bool>();

  std::vector<Member> members;
  std::size_t position = 0;
  for (const auto& m : doc.at("members")) members.push_back(member_from_json(m, catalog, position++));

  Provenance provenance;
  provenance.seed = doc.at("provenance").at("seed").get<std::uint64_t>();
  provenance.training_digest = doc.at("provenance").at("training_digest").get<std::string>();

  Ensemble ens(std::move(catalog), std::move(members), preprocess, std::move(provenance));
  if (doc.contains("digest") && doc.at("digest").get<std::string>() != digest_of(doc)) {
    throw ModelError("model digest mismatch: file content was modified or corrupted");
  }
  return ens;
}

bool has_gz_suffix(const std::filesystem::path& path) {
  const std::string s = path.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

}  // namespace

std::string serialize_model(const Ensemble& ens, std::string_view created) {
  json doc = to_document(ens);
  doc["digest"] = digest_of(doc);
  doc["provenance"]["created"] = std::string(created);
  return doc.dump(1) + "\n";
}

Ensemble deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError("model parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return from_document(doc);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid model file: ") + e.what());
  }
}

std::string model_digest(const Ensemble& ens) { return digest_of(to_document(ens)); }

std::string current_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_model(const Ensemble& ens, const std::filesystem::path& path) {
  const std::string text = serialize_model(ens, current_timestamp());
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.string().c_str(), "wb9");
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    const int written = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    const int closed = gzclose(f);
    if (written != static_cast<int>(text.size()) || closed != Z_OK) {
      throw Error("failed writing " + path.string());
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

Ensemble load_model(const std::filesystem::path& path) {
  std::string raw;
  try {
    raw = read_file(path);
  } catch (const DataError& e) {
    throw ModelError(e.what());
  }
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
      static_cast<unsigned char>(raw[1]) == 0x8b) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (!f) throw ModelError("cannot open " + path.string());
    std::string text;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(f);
    if (failed) throw ModelError(path.string() + ": corrupt gzip stream");
    raw = std::move(text);
  }
  try {
    return deserialize_model(raw);
  } catch (const ModelError& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

}  // namespace lidc
