#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "suffbench/corpus.hpp"
#include "suffbench/gateway/gateway.hpp"
#include "suffbench/prompts.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

/// Number of maximal non-whitespace runs after NFC. Same rule for every
/// language; Persian ZWNJ is not whitespace, so half-spaced compounds count once.
std::size_t count_words(std::string_view text, Language language);

/// Keeps the first `n` words of `text`, preserving the original bytes up to
/// the end of word n.
std::string truncate_words(std::string_view text, std::size_t n);

struct BudgetTable {
  std::size_t base_word_count = 0;
  std::map<int, std::size_t> budgets;  // level percent -> max words

  std::size_t budget(Level level) const;
};

/// budget(v) = max(1, floor((100 - v) * W / 100)) for v in 10..90, computed
/// in integer arithmetic.
std::size_t word_budget(std::size_t base_word_count, Level level);

BudgetTable compute_budgets(const Explanation& base);

struct ParsedGeneration {
  Label label;
  std::string explanation;
};

/// Parses "Answer: <A-D>" on the first non-blank line and the text after an
/// "Explanation:" line (or everything after the answer line when the keyword
/// is missing). Keywords are case-insensitive and may be indented. The label
/// must be an uppercase A-D not followed by a letter or digit. Throws
/// UnparseableOutput.
ParsedGeneration extract_answer_and_explanation(const gateway::GenerationResult& raw);
ParsedGeneration extract_answer_and_explanation(std::string_view raw);

/// Explanation text from a constrained regeneration: uses the structured
/// parse when it succeeds, otherwise the text after an "Explanation:" line,
/// otherwise the whole trimmed output.
std::string extract_constrained_text(std::string_view raw);

struct ConstrainOptions {
  int max_retries = 3;
  gateway::GenerationParams params;
};

/// Regenerates `base` under the word budget for `level`. Over-budget outputs
/// are retried (with the retry note appended) up to max_retries times; if the
/// last attempt is still over budget it is cut to the budget and marked
/// truncated. Throws EmptyCompletion if the final text is empty.
Explanation constrain_explanation(const QuestionItem& item, const Explanation& base, Level level,
                                  gateway::Gateway& gateway, const gateway::ModelEndpoint& endpoint,
                                  const PromptTemplateSet& templates, const ConstrainOptions& options = {});

/// Level-0 explanation from a generation prompt. Unparseable outputs come
/// back with parse_status=unparseable and the raw text preserved.
Explanation generate_base_explanation(const QuestionItem& item, gateway::Gateway& gateway,
                                      const gateway::ModelEndpoint& endpoint, const PromptTemplateSet& templates,
                                      const gateway::GenerationParams& params = {});

}  // namespace suffbench
