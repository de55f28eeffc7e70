#include "lidc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"

#include "lidc/error.hpp"
#include "lidc/features.hpp"

namespace lidc {

ConfusionMatrix::ConfusionMatrix(std::size_t label_count)
    : label_count_(label_count), counts_(label_count * label_count, 0) {}

std::uint64_t ConfusionMatrix::at(LabelId gold, LabelId predicted) const {
  return counts_[gold * label_count_ + predicted];
}

void ConfusionMatrix::add(LabelId gold, LabelId predicted, std::uint64_t count) {
  if (gold >= label_count_ || predicted >= label_count_) {
    throw DataError("label outside confusion matrix of size " + std::to_string(label_count_));
  }
  counts_[gold * label_count_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::uint64_t ConfusionMatrix::row_sum(LabelId gold) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < label_count_; ++p) s += counts_[gold * label_count_ + p];
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(LabelId predicted) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < label_count_; ++g) s += counts_[g * label_count_ + predicted];
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t l = 0; l < label_count_; ++l) s += counts_[l * label_count_ + l];
  return s;
}

ConfusionMatrix confusion(std::span<const LabelId> gold, std::span<const LabelId> predicted,
                          std::size_t label_count) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold/prediction length mismatch: " + std::to_string(gold.size()) + " vs " +
                    std::to_string(predicted.size()));
  }
  if (gold.empty()) throw DataError("cannot build a confusion matrix from zero instances");
  ConfusionMatrix cm(label_count);
  for (std::size_t i = 0; i < gold.size(); ++i) cm.add(gold[i], predicted[i]);
  return cm;
}

ScoreReport score(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw DataError("cannot score an empty confusion matrix");
  const std::size_t L = cm.label_count();

  ScoreReport r;
  r.total = total;
  r.per_label.resize(L);
  double macro = 0.0;
  double weighted = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    const auto id = static_cast<LabelId>(l);
    const double tp = static_cast<double>(cm.at(id, id));
    const double predicted = static_cast<double>(cm.column_sum(id));
    const double actual = static_cast<double>(cm.row_sum(id));
    LabelScore& s = r.per_label[l];
    s.support = cm.row_sum(id);
    s.precision = predicted > 0 ? tp / predicted : 0.0;
    s.recall = actual > 0 ? tp / actual : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    macro += s.f1;
    weighted += s.f1 * actual;
  }
  r.macro_f1 = macro / static_cast<double>(L);
  r.weighted_f1 = weighted / static_cast<double>(total);
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  return r;
}

std::vector<LabelId> random_predictions(std::size_t n, std::size_t label_count,
                                        std::uint64_t seed) {
  if (label_count == 0) throw DataError("random baseline needs at least one label");
  std::mt19937_64 rng(seed);
  std::vector<LabelId> guesses(n);
  for (auto& g : guesses) g = static_cast<LabelId>(rng() % label_count);
  return guesses;
}

ScoreReport random_baseline(std::span<const LabelId> gold, std::size_t label_count,
                            std::uint64_t seed) {
  return score(confusion(gold, random_predictions(gold.size(), label_count, seed), label_count));
}

ErrorReport error_report(const Dataset& dataset, std::span<const LabelId> predicted,
                         std::size_t short_threshold) {
  if (!dataset.fully_labeled()) throw DataError("error report needs a fully labeled dataset");
  if (dataset.size() != predicted.size()) {
    throw DataError("dataset/prediction length mismatch");
  }
  ErrorReport r;
  r.evaluated = dataset.size();
  ConfusionMatrix cm(dataset.catalog.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& doc = dataset.documents[i];
    if (*doc.label == predicted[i]) continue;
    cm.add(*doc.label, predicted[i]);
    const std::size_t tokens = tokenize(doc.text).size();
    r.errors.push_back({i, doc.text, *doc.label, predicted[i], tokens, tokens <= short_threshold});
    if (tokens <= short_threshold) ++r.short_errors;
  }
  if (!r.errors.empty()) {
    r.short_fraction = static_cast<double>(r.short_errors) / static_cast<double>(r.errors.size());
  }
  for (LabelId g = 0; g < cm.label_count(); ++g) {
    for (LabelId p = 0; p < cm.label_count(); ++p) {
      if (g != p && cm.at(g, p) > 0) r.top_pairs.push_back({g, p, cm.at(g, p)});
    }
  }
  std::stable_sort(r.top_pairs.begin(), r.top_pairs.end(),
                   [](const ConfusedPair& a, const ConfusedPair& b) { return a.count > b.count; });
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tabs and newlines inside texts would break the TSV row structure.
std::string tsv_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else if (c == '\\') out += "\\\\";
    else out += c;
  }
  return out;
}

}  // namespace

std::string confusion_csv(const ConfusionMatrix& cm, const LabelCatalog& catalog) {
  std::ostringstream out;
  out << "gold\\predicted";
  for (const auto& l : catalog.labels()) out << ',' << csv_field(l);
  out << '\n';
  for (LabelId g = 0; g < cm.label_count(); ++g) {
    out << csv_field(catalog.name(g));
    for (LabelId p = 0; p < cm.label_count(); ++p) out << ',' << cm.at(g, p);
    out << '\n';
  }
  return out.str();
}

std::string confusion_svg(const ConfusionMatrix& cm, const LabelCatalog& catalog) {
  const std::size_t L = cm.label_count();
  constexpr int kCell = 56;
  constexpr int kMargin = 90;
  const int side = kMargin + static_cast<int>(L) * kCell + 20;
  std::uint64_t max_count = 1;
  for (LabelId g = 0; g < L; ++g)
    for (LabelId p = 0; p < L; ++p) max_count = std::max(max_count, cm.at(g, p));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"16\">predicted</text>\n";
  out << "<text x=\"4\" y=\"" << kMargin - 8 << "\">gold</text>\n";
  for (std::size_t l = 0; l < L; ++l) {
    const int c = kMargin + static_cast<int>(l) * kCell + kCell / 2;
    const auto name = xml_escape(catalog.name(static_cast<LabelId>(l)));
    out << "<text x=\"" << c << "\" y=\"" << kMargin - 8 << "\" text-anchor=\"middle\">" << name
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << c + 4 << "\" text-anchor=\"end\">" << name
        << "</text>\n";
  }
  for (LabelId g = 0; g < L; ++g) {
    for (LabelId p = 0; p < L; ++p) {
      const auto count = cm.at(g, p);
      const double t = static_cast<double>(count) / static_cast<double>(max_count);
      const int shade = 255 - static_cast<int>(t * 200.0);
      const int x = kMargin + static_cast<int>(p) * kCell;
      const int y = kMargin + static_cast<int>(g) * kCell;
      char fill[8];
      std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"" << fill << "\" stroke=\"#888\"/>\n";
      out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << (t > 0.6 ? "#fff" : "#000") << "\">" << count
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string score_json(const ScoreReport& report, const LabelCatalog& catalog) {
  nlohmann::json j;
  j["macro_f1"] = report.macro_f1;
  j["weighted_f1"] = report.weighted_f1;
  j["accuracy"] = report.accuracy;
  j["total"] = report.total;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t l = 0; l < report.per_label.size(); ++l) {
    const auto& s = report.per_label[l];
    per.push_back({{"label", catalog.name(static_cast<LabelId>(l))},
                   {"precision", s.precision},
                   {"recall", s.recall},
                   {"f1", s.f1},
                   {"support", s.support}});
  }
  j["per_label"] = std::move(per);
  return j.dump(2) + "\n";
}

std::string error_report_tsv(const ErrorReport& report, const LabelCatalog& catalog) {
  std::ostringstream out;
  out << "# misclassified\t" << report.errors.size() << "\tof\t" << report.evaluated << '\n';
  out << "# short\t" << report.short_errors << "\tfraction\t" << report.short_fraction << '\n';
  for (const auto& p : report.top_pairs) {
    out << "# confused\t" << catalog.name(p.gold) << "\t" << catalog.name(p.predicted) << '\t'
        << p.count << '\n';
  }
  out << "index\tgold\tpredicted\ttokens\tshort\ttext\n";
  for (const auto& e : report.errors) {
    out << e.index << '\t' << catalog.name(e.gold) << '\t' << catalog.name(e.predicted) << '\t'
        << e.tokens << '\t' << (e.is_short ? "true" : "false") << '\t' << tsv_field(e.text)
        << '\n';
  }
  return out.str();
}

}  // namespace lidc
