#include "suffbench/masker.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "suffbench/constrainer.hpp"
#include "suffbench/text.hpp"

namespace suffbench {

namespace {

using text::CodePoint;

struct Span {
  std::size_t begin;
  std::size_t end;
};

bool overlaps(const std::vector<Span>& spans, std::size_t begin, std::size_t end) {
  return std::any_of(spans.begin(), spans.end(), [&](const Span& s) { return begin < s.end && s.begin < end; });
}

std::vector<Span> existing_masks(std::string_view s) {
  std::vector<Span> out;
  for (std::size_t pos = s.find(kMaskToken); pos != std::string_view::npos; pos = s.find(kMaskToken, pos + 1)) {
    out.push_back({pos, pos + kMaskToken.size()});
  }
  return out;
}

// Folded, whitespace-collapsed view of the text with a map back to bytes.
struct NormalizedView {
  std::u32string chars;
  std::vector<Span> source;
};

NormalizedView normalize_view(const std::vector<CodePoint>& cps) {
  NormalizedView view;
  for (const auto& cp : cps) {
    if (text::is_space(cp.value)) {
      if (!view.chars.empty() && view.chars.back() == U' ') {
        view.source.back().end = cp.offset + cp.length;
      } else {
        view.chars.push_back(U' ');
        view.source.push_back({cp.offset, cp.offset + cp.length});
      }
      continue;
    }
    view.chars.push_back(static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp.value), U_FOLD_CASE_DEFAULT)));
    view.source.push_back({cp.offset, cp.offset + cp.length});
  }
  return view;
}

std::u32string to_u32(std::string_view s) {
  std::u32string out;
  for (const auto& cp : text::decode(s)) out.push_back(cp.value);
  return out;
}

std::vector<Span> option_text_spans(const std::vector<CodePoint>& cps, const QuestionItem& item,
                                    const std::vector<Span>& protected_spans) {
  std::vector<std::u32string> keys;
  for (Label l : kLabels) {
    auto key = to_u32(text::comparison_key(item.option(l)));
    if (!key.empty()) keys.push_back(std::move(key));
  }
  // Longest first so the first hit at a position is the longest one.
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  NormalizedView view = normalize_view(cps);
  const auto& chars = view.chars;
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < chars.size()) {
    bool matched = false;
    bool left_ok = i == 0 || !text::is_alnum(chars[i - 1]);
    for (const auto& key : keys) {
      if (i + key.size() > chars.size()) continue;
      if (text::is_alnum(key.front()) && !left_ok) continue;
      if (chars.compare(i, key.size(), key) != 0) continue;
      std::size_t last = i + key.size() - 1;
      if (text::is_alnum(key.back()) && last + 1 < chars.size() && text::is_alnum(chars[last + 1])) continue;
      Span span{view.source[i].begin, view.source[last].end};
      if (overlaps(protected_spans, span.begin, span.end)) continue;
      spans.push_back(span);
      i = last + 1;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return spans;
}

bool is_sentence_punct(char32_t c) {
  switch (c) {
    case U'.':
    case U',':
    case U':':
    case U';':
    case U'!':
    case U'?':
    case U'،':  // Arabic comma
    case U'؛':  // Arabic semicolon
    case U'؟':  // Arabic question mark
      return true;
    default:
      return false;
  }
}

bool is_sentence_end(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'؟' || c == U'۔'; }

// Lower-cased ASCII with non-ASCII bytes untouched.
std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Keyword forms that introduce an option letter. Persian: option (plain and
// three ezafe spellings), answer (two words), choice. Heh + hamza above stays
// two code points under NFC, so it is listed next to precomposed U+06C0.
const std::array<std::string_view, 10> kKeywords{
    "option", "choice", "answer",
    "\u06af\u0632\u06cc\u0646\u0647",
    "\u06af\u0632\u06cc\u0646\u0647\u0654",
    "\u06af\u0632\u06cc\u0646\u06c0",
    "\u06af\u0632\u06cc\u0646\u0647\u200c\u06cc",
    "\u067e\u0627\u0633\u062e",
    "\u062c\u0648\u0627\u0628",
    "\u0627\u0646\u062a\u062e\u0627\u0628",
};

// Whitespace-delimited words ending just before code point index `end`,
// stripped of surrounding punctuation, lower-cased. At most `count` words.
std::vector<std::string> preceding_words(std::string_view s, const std::vector<CodePoint>& cps, std::size_t end,
                                         std::size_t count) {
  std::vector<std::string> words;
  std::size_t j = end;
  while (words.size() < count) {
    while (j > 0 && text::is_space(cps[j - 1].value)) --j;
    if (j == 0) break;
    std::size_t word_end = j;
    while (j > 0 && !text::is_space(cps[j - 1].value)) --j;
    std::size_t word_begin = j;
    // Trim punctuation such as "(option" or "answer:".
    while (word_begin < word_end && !text::is_alnum(cps[word_begin].value)) ++word_begin;
    while (word_end > word_begin && !text::is_alnum(cps[word_end - 1].value)) --word_end;
    if (word_begin == word_end) {
      words.emplace_back();
    } else {
      std::size_t b = cps[word_begin].offset;
      std::size_t e = cps[word_end - 1].offset + cps[word_end - 1].length;
      words.push_back(ascii_lower(s.substr(b, e - b)));
    }
  }
  return words;
}

bool keyword_context(std::string_view s, const std::vector<CodePoint>& cps, std::size_t idx) {
  // Separator between keyword and letter: whitespace and/or a single ':'.
  std::size_t j = idx;
  bool separated = false;
  while (j > 0 && text::is_space(cps[j - 1].value)) {
    --j;
    separated = true;
  }
  if (j > 0 && cps[j - 1].value == U':') {
    --j;
    separated = true;
    while (j > 0 && text::is_space(cps[j - 1].value)) --j;
  }
  if (!separated || j == 0) return false;
  // The keyword must end right here, not behind other punctuation.
  if (!text::is_alnum(cps[j - 1].value)) return false;

  auto words = preceding_words(s, cps, j, 2);
  if (words.empty()) return false;
  if (std::find(kKeywords.begin(), kKeywords.end(), words[0]) != kKeywords.end()) return true;
  return words[0] == "is" && words.size() == 2 && words[1] == "answer";
}

bool sentence_start(const std::vector<CodePoint>& cps, std::size_t idx) {
  std::size_t j = idx;
  bool saw_space = false;
  while (j > 0) {
    char32_t c = cps[j - 1].value;
    if (c == U'\n' || c == U'\r') return true;
    if (!text::is_space(c)) break;
    saw_space = true;
    --j;
  }
  if (j == 0) return true;
  return saw_space && is_sentence_end(cps[j - 1].value);
}

std::vector<Span> label_spans(std::string_view s, const std::vector<CodePoint>& cps,
                              const std::vector<Span>& excluded) {
  std::vector<Span> spans;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i].value;
    if (c < U'A' || c > U'D') continue;
    char32_t prev = i > 0 ? cps[i - 1].value : U' ';
    char32_t next = i + 1 < cps.size() ? cps[i + 1].value : U' ';
    if (text::is_alnum(prev) || text::is_alnum(next)) continue;
    if (overlaps(excluded, cps[i].offset, cps[i].offset + 1)) continue;

    bool hit = next == U')' || keyword_context(s, cps, i) || (is_sentence_punct(next) && sentence_start(cps, i));
    if (hit) spans.push_back({cps[i].offset, cps[i].offset + cps[i].length});
  }
  return spans;
}

}  // namespace

std::vector<LeakSpan> find_leaks(std::string_view s, const QuestionItem& item) {
  auto cps = text::decode(s);
  auto masks = existing_masks(s);
  auto option_spans = option_text_spans(cps, item, masks);

  std::vector<Span> excluded = masks;
  excluded.insert(excluded.end(), option_spans.begin(), option_spans.end());
  auto labels = label_spans(s, cps, excluded);

  std::vector<LeakSpan> leaks;
  leaks.reserve(option_spans.size() + labels.size());
  for (const auto& sp : option_spans) leaks.push_back({sp.begin, sp.end, LeakKind::option_text});
  for (const auto& sp : labels) leaks.push_back({sp.begin, sp.end, LeakKind::label});
  std::sort(leaks.begin(), leaks.end(), [](const LeakSpan& a, const LeakSpan& b) { return a.begin < b.begin; });
  return leaks;
}

std::pair<Explanation, MaskReport> mask_explanation(const Explanation& explanation, const QuestionItem& item) {
  auto leaks = find_leaks(explanation.text, item);

  MaskReport report;
  report.run_id = explanation.run_id;
  report.item_id = explanation.item_id;
  report.language = explanation.language;
  report.generator_model = explanation.generator_model;
  report.level = explanation.level;

  std::string out;
  out.reserve(explanation.text.size());
  std::size_t pos = 0;
  for (const auto& leak : leaks) {
    out.append(explanation.text, pos, leak.begin - pos);
    out.append(kMaskToken);
    pos = leak.end;
    (leak.kind == LeakKind::label ? report.label_hits : report.text_hits) += 1;
  }
  out.append(explanation.text, pos, std::string::npos);
  report.masked_text = out;

  Explanation masked = explanation;
  masked.text = std::move(out);
  masked.masking = Masking::masked;
  masked.word_count = count_words(masked.text, masked.language);
  return {std::move(masked), std::move(report)};
}

bool verify_masked(std::string_view s, const QuestionItem& item) { return find_leaks(s, item).empty(); }

}  // namespace suffbench
