#include "suffbench/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "suffbench/error.hpp"

namespace suffbench::text {

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) {
    std::string out;
    src.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

std::string fold_case(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (const auto& cp : decode(utf8)) {
    append_utf8(out, static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp.value), U_FOLD_CASE_DEFAULT)));
  }
  return out;
}

std::string comparison_key(std::string_view utf8) {
  std::string folded = fold_case(nfc(utf8));
  std::string out;
  bool pending_space = false;
  for (const auto& cp : decode(folded)) {
    if (is_space(cp.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(folded, cp.offset, cp.length);
  }
  return out;
}

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0; }

bool is_alnum(char32_t cp) {
  // Marks (e.g. Persian diacritics, ZWNJ-adjacent combining marks) stay inside words.
  auto c = static_cast<UChar32>(cp);
  if (u_isalnum(c)) return true;
  auto gc = U_GET_GC_MASK(c);
  return (gc & U_GC_M_MASK) != 0;
}

std::vector<CodePoint> decode(std::string_view utf8) {
  std::vector<CodePoint> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      c = 0xFFFD;
      i = start + 1;
    }
    out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(start),
                   static_cast<std::size_t>(i - start)});
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    out.append("\xEF\xBF\xBD");
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

std::vector<std::pair<std::size_t, std::size_t>> word_spans(std::string_view utf8) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  bool in_word = false;
  std::size_t begin = 0;
  for (const auto& cp : decode(utf8)) {
    bool space = is_space(cp.value);
    if (!space && !in_word) {
      begin = cp.offset;
      in_word = true;
    } else if (space && in_word) {
      spans.emplace_back(begin, cp.offset);
      in_word = false;
    }
  }
  if (in_word) spans.emplace_back(begin, utf8.size());
  return spans;
}

std::string trim(std::string_view s) {
  auto cps = decode(s);
  std::size_t first = 0;
  while (first < cps.size() && is_space(cps[first].value)) ++first;
  if (first == cps.size()) return {};
  std::size_t last = cps.size();
  while (last > first && is_space(cps[last - 1].value)) --last;
  std::size_t begin = cps[first].offset;
  std::size_t end = cps[last - 1].offset + cps[last - 1].length;
  return std::string(s.substr(begin, end - begin));
}

}  // namespace suffbench::text
