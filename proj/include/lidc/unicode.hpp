#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lidc::unicode {

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text);

inline bool is_valid_utf8(std::string_view text) {
  return find_invalid_utf8(text) == std::string_view::npos;
}

// Byte offsets of every code point start plus a final entry equal to
// text.size(). Input must be valid UTF-8.
std::vector<std::size_t> code_point_offsets(std::string_view text);

std::vector<char32_t> decode(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

// Unicode White_Space property.
bool is_whitespace(char32_t cp);
// General category P* (Pc, Pd, Ps, Pe, Pi, Pf, Po).
bool is_punctuation(char32_t cp);
// Simple (1:1) lowercase mapping.
char32_t to_lower(char32_t cp);

}  // namespace lidc::unicode
