#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suffbench/corpus.hpp"
#include "suffbench/gateway/gateway.hpp"
#include "suffbench/prompts.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

/// Generator name recorded on no-explanation baseline results.
inline constexpr std::string_view kBaselineModel = "baseline";

using OptionProbs = std::array<double, 4>;
using OptionLogprobs = std::array<double, 4>;

struct ScoreResult {
  std::string run_id;
  std::string item_id;
  Language language = Language::en;
  std::string generator_model;  // or "baseline"
  Level level{0};               // Level::noexp() for the baseline
  OptionProbs option_probs{};
  double sufficiency = 0.0;  // option_probs[gold]
  Label predicted = Label::A;
  bool correct = false;
  std::string scorer_model;
  std::string prompt_fingerprint;

  friend bool operator==(const ScoreResult&, const ScoreResult&) = default;
};

/// softmax over the four option logprobs.
OptionProbs option_distribution(const OptionLogprobs& lp);

/// argmax with ties broken alphabetically (first of A..D).
Label argmax_label(const OptionProbs& probs);

/// Summed logprobs of the continuations " A", " B", " C", " D" after the
/// prompt. Any failure fails the whole item.
OptionLogprobs option_logprobs(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer,
                               const RenderedPrompt& prompt);

/// ScoreOptions: option_logprobs followed by softmax.
OptionProbs score_options(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer,
                          const RenderedPrompt& prompt);

/// Fills every ScoreResult field from a distribution already computed for `prompt`.
ScoreResult make_score_result(const QuestionItem& item, const std::optional<Explanation>& explanation,
                              const RenderedPrompt& prompt, const OptionProbs& probs, const std::string& scorer_model);

/// Sufficiency of one (masked) explanation, or the baseline when absent.
ScoreResult score_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer, const QuestionItem& item,
                       const std::optional<Explanation>& explanation, const PromptTemplateSet& templates);

/// Arithmetic mean of the sufficiency fields. Throws on an empty list.
double mean_sufficiency(std::span<const ScoreResult> results);

}  // namespace suffbench
