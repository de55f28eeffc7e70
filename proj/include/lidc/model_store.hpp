#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lidc/ensemble.hpp"

namespace lidc {

inline constexpr int kModelFormatVersion = 1;

/// Canonical JSON text of a trained ensemble. Keys are sorted and doubles use
/// the shortest round-trip form, so the same ensemble and timestamp always
/// produce the same bytes. `created` goes into provenance and is the only
/// field left out of the embedded digest.
std::string serialize_model(const Ensemble& ens, std::string_view created);
Ensemble deserialize_model(std::string_view text);

/// Hex SHA-256 over the canonical form without the timestamp.
std::string model_digest(const Ensemble& ens);

/// Writes the model; gzip-compressed when the path ends in ".gz". The
/// timestamp is the current UTC time, or SOURCE_DATE_EPOCH when set.
void save_model(const Ensemble& ens, const std::filesystem::path& path);
/// Reads plain or gzip-compressed model files (detected by magic bytes).
Ensemble load_model(const std::filesystem::path& path);

std::string current_timestamp();

}  // namespace lidc
