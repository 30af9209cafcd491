#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glsc::utf8 {

inline constexpr char32_t kReplacement = U'\uFFFD';

// Decodes one code point starting at `pos`; on success advances `pos`.
// Returns nullopt on an ill-formed sequence (overlong, surrogate, truncated,
// out of range) and leaves `pos` untouched.
std::optional<char32_t> decode_one(std::string_view text, std::size_t& pos);

bool is_valid(std::string_view text);

// Byte offset of the first ill-formed sequence, or nullopt if the text is valid.
std::optional<std::size_t> first_invalid(std::string_view text);

void append(std::string& out, char32_t cp);

// Decodes the whole string; ill-formed bytes become U+FFFD.
std::vector<char32_t> decode_lossy(std::string_view text);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_cjk(char32_t cp);
char32_t to_lower_latin(char32_t cp);

}  // namespace glsc::utf8
