#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "suffbench/corpus.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

/// Every scoring and baseline prompt ends with exactly these 14 bytes.
inline constexpr std::string_view kAnswerSuffix = "The answer is ";

enum class PromptKind { generate, constrain, score, baseline };
std::string_view to_string(PromptKind k);

/// Versioned template texts for one language.
///
/// Placeholders use `{name}`; `{{` and `}}` are literal braces. Bound names:
///   generation:   stem, options
///   constrain:    stem, options, base_explanation, word_budget
///   retry:        word_budget, word_count   (appended to a constrain render)
///   scoring:      stem, explanation, options
///   baseline:     stem, options
struct PromptTemplateSet {
  std::string template_id;
  Language language = Language::en;
  std::string generation_template;
  std::string constrain_template;
  std::string retry_template;
  std::string scoring_template;
  std::string baseline_template;

  /// Checks suffixes and that every placeholder is bindable. Throws TemplateError.
  void validate() const;

  /// SHA-256 over all template texts; recorded in the run manifest.
  std::string content_hash() const;
};

/// Reads `<root>/<template_id>/{generate,constrain,retry,score,baseline}.<lang>.txt`.
/// One trailing newline is stripped from each file.
PromptTemplateSet load_templates(const std::filesystem::path& root, const std::string& template_id,
                                 Language language);

struct RenderedPrompt {
  PromptKind kind = PromptKind::generate;
  std::string text;
  std::string item_id;
  Level level{0};
  std::string template_id;
};

/// Substitutes `{name}` placeholders. Throws TemplateError on an unbound or
/// malformed placeholder.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

/// "A. <text>\nB. <text>\nC. <text>\nD. <text>" in fixed A-D order.
std::string format_options(const QuestionItem& item);

RenderedPrompt render_generation(const QuestionItem& item, const PromptTemplateSet& templates);

/// `level` is the target constraint level recorded on the prompt.
RenderedPrompt render_constrain(const QuestionItem& item, const Explanation& base, std::size_t word_budget,
                                Level level, const PromptTemplateSet& templates);

/// Constrain prompt followed by the retry note for an over-budget attempt.
RenderedPrompt render_constrain_retry(const QuestionItem& item, const Explanation& base, std::size_t word_budget,
                                      Level level, std::size_t previous_word_count,
                                      const PromptTemplateSet& templates);

/// Score prompt when an explanation is given, baseline prompt otherwise.
/// The explanation must be masked and pass verify_masked; otherwise LeakHazard.
RenderedPrompt render_scoring(const QuestionItem& item, const std::optional<Explanation>& explanation,
                              const PromptTemplateSet& templates);

}  // namespace suffbench
