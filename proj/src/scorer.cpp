#include "suffbench/scorer.hpp"

#include <stdexcept>

#include "suffbench/hash.hpp"
#include "suffbench/kernels.hpp"

namespace suffbench {

OptionProbs option_distribution(const OptionLogprobs& lp) {
  OptionProbs p{};
  kernels::softmax_row(lp, p);
  return p;
}

Label argmax_label(const OptionProbs& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<Label>(best);
}

OptionLogprobs option_logprobs(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer,
                               const RenderedPrompt& prompt) {
  if (prompt.kind != PromptKind::score && prompt.kind != PromptKind::baseline) {
    throw std::invalid_argument("option scoring needs a score or baseline prompt");
  }
  if (!prompt.text.ends_with(kAnswerSuffix)) {
    throw std::invalid_argument("scoring prompt must end with \"The answer is \"");
  }
  OptionLogprobs lp{};
  for (Label l : kLabels) {
    const std::string continuation{' ', to_char(l)};
    lp[index_of(l)] = gateway.score_continuation(scorer, prompt.text, continuation).total_logprob;
  }
  return lp;
}

OptionProbs score_options(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer,
                          const RenderedPrompt& prompt) {
  return option_distribution(option_logprobs(gateway, scorer, prompt));
}

ScoreResult make_score_result(const QuestionItem& item, const std::optional<Explanation>& explanation,
                              const RenderedPrompt& prompt, const OptionProbs& probs,
                              const std::string& scorer_model) {
  ScoreResult r;
  r.item_id = item.id;
  r.language = item.language;
  r.generator_model = explanation ? explanation->generator_model : std::string(kBaselineModel);
  r.level = explanation ? explanation->level : Level::noexp();
  r.option_probs = probs;
  r.sufficiency = probs[index_of(item.gold)];
  r.predicted = argmax_label(probs);
  r.correct = r.predicted == item.gold;
  r.scorer_model = scorer_model;
  r.prompt_fingerprint = sha256_hex(prompt.text);
  return r;
}

ScoreResult score_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& scorer, const QuestionItem& item,
                       const std::optional<Explanation>& explanation, const PromptTemplateSet& templates) {
  RenderedPrompt prompt = render_scoring(item, explanation, templates);
  return make_score_result(item, explanation, prompt, score_options(gateway, scorer, prompt), scorer.model_id);
}

double mean_sufficiency(std::span<const ScoreResult> results) {
  if (results.empty()) throw std::invalid_argument("mean_sufficiency of an empty list");
  double sum = 0.0;
  for (const auto& r : results) sum += r.sufficiency;
  return sum / static_cast<double>(results.size());
}

}  // namespace suffbench
