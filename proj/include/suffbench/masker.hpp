#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "suffbench/corpus.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

inline constexpr std::string_view kMaskToken = "[MASK]";

/// Version tag of the masking rules; recorded in the run manifest and
/// pinned by tests/data/mask_golden.json.
inline constexpr std::string_view kMaskRulesVersion = "mask-rules-1";

struct MaskReport {
  std::string run_id;
  std::string item_id;
  Language language = Language::en;
  std::string generator_model;
  Level level{0};
  std::size_t label_hits = 0;
  std::size_t text_hits = 0;
  std::string masked_text;

  friend bool operator==(const MaskReport&, const MaskReport&) = default;
};

enum class LeakKind { label, option_text };

struct LeakSpan {
  std::size_t begin;  // byte offsets into the scanned text
  std::size_t end;
  LeakKind kind;

  friend bool operator==(const LeakSpan&, const LeakSpan&) = default;
};

/// Finds answer leaks in `text`, sorted and non-overlapping.
///
/// Option texts: full option text only, compared after NFC, case folding and
/// whitespace collapsing, at word boundaries, longest match first, scanning
/// left to right.
///
/// Labels: an uppercase A-D standing alone (no adjacent letter or digit) in
/// one of these contexts:
///   (X)   X)   option X   choice X   answer X   answer is X
///   گزینه X   پاسخ X   جواب X      (keyword forms: case-insensitive, optional ':')
///   X at the start of a sentence followed by punctuation, e.g. "B. Plants ..."
/// A lower-case "a" never matches. Text inside existing "[MASK]" tokens is
/// never matched, which makes masking idempotent.
std::vector<LeakSpan> find_leaks(std::string_view text, const QuestionItem& item);

/// Replaces every leak span with "[MASK]" and returns the masked explanation.
/// Already-masked input is rescanned, so masking twice changes nothing.
std::pair<Explanation, MaskReport> mask_explanation(const Explanation& explanation, const QuestionItem& item);

/// True iff `text` has no label-pattern match and no verbatim option text.
bool verify_masked(std::string_view text, const QuestionItem& item);

}  // namespace suffbench
