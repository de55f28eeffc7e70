#include "lidc/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <memory>

#include "lidc/error.hpp"
#include "lidc/unicode.hpp"

namespace lidc {

LabelCatalog::LabelCatalog(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

const std::string& LabelCatalog::name(LabelId id) const {
  if (id >= labels_.size()) {
    throw DataError("label id " + std::to_string(id) + " outside catalog of size " +
                    std::to_string(labels_.size()));
  }
  return labels_[id];
}

std::optional<LabelId> LabelCatalog::find(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<LabelId>(it - labels_.begin());
}

bool Dataset::fully_labeled() const {
  return std::all_of(documents.begin(), documents.end(),
                     [](const Document& d) { return d.label.has_value(); });
}

std::vector<LabelId> Dataset::labels() const {
  std::vector<LabelId> out;
  out.reserve(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (!documents[i].label) {
      throw DataError("document " + std::to_string(i + 1) + " has no label");
    }
    out.push_back(*documents[i].label);
  }
  return out;
}

std::vector<std::string> Dataset::texts() const {
  std::vector<std::string> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.text);
  return out;
}

Dataset make_dataset(std::vector<std::string> texts, std::span<const std::string> labels) {
  if (texts.size() != labels.size()) {
    throw DataError("text/label count mismatch: " + std::to_string(texts.size()) + " vs " +
                    std::to_string(labels.size()));
  }
  Dataset ds;
  ds.catalog = LabelCatalog({labels.begin(), labels.end()});
  ds.documents.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    ds.documents.push_back({std::move(texts[i]), ds.catalog.find(labels[i])});
  }
  return ds;
}

Dataset parse_tsv(std::string_view content, bool labeled) {
  if (auto bad = unicode::find_invalid_utf8(content); bad != std::string_view::npos) {
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(content.begin(), content.begin() + bad, '\n'));
    throw DataError("invalid UTF-8 at byte " + std::to_string(bad) + " (line " +
                    std::to_string(line) + ")");
  }

  std::vector<std::string> texts;
  std::vector<std::optional<std::string>> labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;

    if (!labeled) {
      texts.emplace_back(line);
      labels.emplace_back(std::nullopt);
      continue;
    }
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("line " + std::to_string(line_no) + ": missing tab between text and label");
    }
    std::string_view label = line.substr(tab + 1);
    if (!label.empty() && label.back() == '\r') label.remove_suffix(1);
    texts.emplace_back(line.substr(0, tab));
    labels.emplace_back(std::string(label));
  }

  std::vector<std::string> observed;
  for (const auto& l : labels) {
    if (l) observed.push_back(*l);
  }
  Dataset ds;
  ds.catalog = LabelCatalog(std::move(observed));
  ds.documents.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::optional<LabelId> id;
    if (labels[i]) id = ds.catalog.find(*labels[i]);
    ds.documents.push_back({std::move(texts[i]), id});
  }
  return ds;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Dataset load_tsv(const std::filesystem::path& path, bool labeled) {
  const std::string content = read_file(path);
  Dataset ds;
  try {
    ds = parse_tsv(content, labeled);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  ds.source_digest = sha256_hex(content);
  return ds;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string strip_punctuation(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_punctuation(cp) || unicode::is_whitespace(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, cp);
  }
  return out;
}

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : unicode::decode(text)) unicode::append_utf8(out, unicode::to_lower(cp));
  return out;
}

std::string Preprocess::apply(std::string_view text) const {
  std::string out(text);
  if (lowercase) out = lidc::lowercase(out);
  if (strip_punctuation) out = lidc::strip_punctuation(out);
  return out;
}

}  // namespace lidc

namespace lidc {

std::vector<LabelId> remap_labels(const Dataset& dataset, const LabelCatalog& target) {
  std::vector<LabelId> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& doc = dataset.documents[i];
    if (!doc.label) throw DataError("document " + std::to_string(i + 1) + " has no label");
    const std::string& name = dataset.catalog.name(*doc.label);
    auto id = target.find(name);
    if (!id) {
      throw DataError("label '" + name + "' (document " + std::to_string(i + 1) +
                      ") is not in the model's label set");
    }
    out.push_back(*id);
  }
  return out;
}

}  // namespace lidc
