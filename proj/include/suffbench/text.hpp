#pragma once

// UTF-8 text helpers backed by ICU.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace suffbench::text {

/// Unicode NFC normalization. Invalid UTF-8 sequences become U+FFFD.
std::string nfc(std::string_view utf8);

/// Simple (1:1 code point) case folding.
std::string fold_case(std::string_view utf8);

/// NFC, case fold, collapse whitespace runs to one ASCII space, trim.
std::string comparison_key(std::string_view utf8);

bool is_space(char32_t cp);
bool is_alnum(char32_t cp);

/// Decoded code point with its byte span in the source string.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

/// Decodes UTF-8; malformed sequences decode as U+FFFD covering one byte.
std::vector<CodePoint> decode(std::string_view utf8);

void append_utf8(std::string& out, char32_t cp);

/// Byte spans [begin, end) of maximal non-whitespace runs.
std::vector<std::pair<std::size_t, std::size_t>> word_spans(std::string_view utf8);

std::string trim(std::string_view s);

}  // namespace suffbench::text
