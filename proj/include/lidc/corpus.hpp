#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lidc {

using LabelId = std::uint32_t;

struct Document {
  std::string text;
  std::optional<LabelId> label;
};

/// Sorted, duplicate-free set of label strings. The position of a label in
/// the catalog is its LabelId, and ascending catalog order is the tie-break
/// order used by prediction and voting.
class LabelCatalog {
 public:
  LabelCatalog() = default;

  /// Accepts labels in any order and with repeats.
  explicit LabelCatalog(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::string& name(LabelId id) const;
  std::optional<LabelId> find(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const LabelCatalog&) const = default;

 private:
  std::vector<std::string> labels_;
};

struct Dataset {
  std::vector<Document> documents;
  LabelCatalog catalog;
  // SHA-256 of the raw file bytes when loaded from disk, hex encoded.
  std::string source_digest;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
  bool fully_labeled() const;
  std::vector<LabelId> labels() const;
  std::vector<std::string> texts() const;
};

/// Builds a labeled dataset from parallel text/label lists.
Dataset make_dataset(std::vector<std::string> texts, std::span<const std::string> labels);

/// Parses TSV content. Labeled mode splits each non-empty line on its first
/// tab into text and label; unlabeled mode keeps every line as a text.
Dataset parse_tsv(std::string_view content, bool labeled);
Dataset load_tsv(const std::filesystem::path& path, bool labeled);

std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

std::string strip_punctuation(std::string_view text);
std::string lowercase(std::string_view text);

// Text normalization applied identically at training and prediction time.
struct Preprocess {
  bool strip_punctuation = false;
  bool lowercase = false;

  std::string apply(std::string_view text) const;
  bool operator==(const Preprocess&) const = default;
};

}  // namespace lidc

namespace lidc {

/// Gold label ids of a labeled dataset expressed in another catalog (for
/// example a trained model's). Throws DataError for unknown labels.
std::vector<LabelId> remap_labels(const Dataset& dataset, const LabelCatalog& target);

}  // namespace lidc
