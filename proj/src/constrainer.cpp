#include "suffbench/constrainer.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "suffbench/error.hpp"
#include "suffbench/text.hpp"

namespace suffbench {

namespace {

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find('\n', pos);
    if (end == std::string_view::npos) end = s.size();
    std::string_view line = s.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::string_view ltrim(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Matches "<keyword>\s*:" case-insensitively at the start of `s`; returns the
// remainder after the colon.
std::optional<std::string_view> strip_keyword(std::string_view s, std::string_view keyword) {
  if (s.size() < keyword.size()) return std::nullopt;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != keyword[i]) return std::nullopt;
  }
  std::string_view rest = ltrim(s.substr(keyword.size()));
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return rest.substr(1);
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t from, std::string_view first) {
  std::string out(first);
  for (std::size_t i = from; i < lines.size(); ++i) {
    out.push_back('\n');
    out.append(lines[i]);
  }
  return out;
}

// Text following the first line that begins with "Explanation:".
std::optional<std::string> explanation_after_keyword(const std::vector<std::string_view>& lines, std::size_t from) {
  for (std::size_t i = from; i < lines.size(); ++i) {
    if (auto rest = strip_keyword(ltrim(lines[i]), "explanation")) {
      return text::trim(join_lines(lines, i + 1, *rest));
    }
  }
  return std::nullopt;
}

}  // namespace

std::size_t count_words(std::string_view s, Language) { return text::word_spans(text::nfc(s)).size(); }

std::string truncate_words(std::string_view s, std::size_t n) {
  if (n == 0) return {};
  auto spans = text::word_spans(s);
  if (spans.size() <= n) return std::string(s);
  return std::string(s.substr(0, spans[n - 1].second));
}

std::size_t word_budget(std::size_t base_word_count, Level level) {
  if (level.is_noexp() || level.percent() < 10 || level.percent() > 90 || level.percent() % 10 != 0) {
    throw std::invalid_argument("constraint level must be one of 10..90, got " + level.to_string());
  }
  auto keep = static_cast<std::size_t>(100 - level.percent());
  return std::max<std::size_t>(1, keep * base_word_count / 100);
}

std::size_t BudgetTable::budget(Level level) const {
  auto it = budgets.find(level.percent());
  if (level.is_noexp() || it == budgets.end()) throw std::out_of_range("no budget for level " + level.to_string());
  return it->second;
}

BudgetTable compute_budgets(const Explanation& base) {
  if (base.level != Level(0)) throw std::invalid_argument("budgets need a level-0 explanation");
  if (base.word_count == 0) throw std::invalid_argument("empty base explanation for item '" + base.item_id + "'");
  BudgetTable table;
  table.base_word_count = base.word_count;
  for (int v = 10; v <= 90; v += 10) table.budgets[v] = word_budget(base.word_count, Level(v));
  return table;
}

ParsedGeneration extract_answer_and_explanation(std::string_view raw) {
  auto lines = split_lines(raw);
  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw UnparseableOutput("empty generator output");

  auto rest = strip_keyword(ltrim(lines[i]), "answer");
  if (!rest) throw UnparseableOutput("first line is not 'Answer: <letter>'");
  std::string_view after = ltrim(*rest);
  if (after.empty() || after[0] < 'A' || after[0] > 'D' || (after.size() > 1 && is_ascii_alnum(after[1]))) {
    throw UnparseableOutput("answer label outside A-D");
  }
  ParsedGeneration parsed{static_cast<Label>(after[0] - 'A'), {}};

  std::string explanation;
  // "Answer: B Explanation: ..." on a single line.
  std::string_view tail = after.substr(1);
  std::size_t inline_kw = std::string_view::npos;
  for (std::size_t k = 0; k + 11 <= tail.size(); ++k) {
    if (strip_keyword(tail.substr(k), "explanation")) {
      inline_kw = k;
      break;
    }
  }
  if (inline_kw != std::string_view::npos) {
    explanation = text::trim(join_lines(lines, i + 1, *strip_keyword(tail.substr(inline_kw), "explanation")));
  } else if (auto found = explanation_after_keyword(lines, i + 1)) {
    explanation = *found;
  } else {
    explanation = text::trim(join_lines(lines, i + 1, ""));
  }
  if (explanation.empty()) throw UnparseableOutput("explanation is empty");
  parsed.explanation = text::nfc(explanation);
  return parsed;
}

ParsedGeneration extract_answer_and_explanation(const gateway::GenerationResult& raw) {
  return extract_answer_and_explanation(raw.text);
}

std::string extract_constrained_text(std::string_view raw) {
  try {
    return extract_answer_and_explanation(raw).explanation;
  } catch (const UnparseableOutput&) {
  }
  if (auto found = explanation_after_keyword(split_lines(raw), 0)) return text::nfc(*found);
  return text::nfc(text::trim(raw));
}

Explanation constrain_explanation(const QuestionItem& item, const Explanation& base, Level level,
                                  gateway::Gateway& gateway, const gateway::ModelEndpoint& endpoint,
                                  const PromptTemplateSet& templates, const ConstrainOptions& options) {
  if (base.level != Level(0)) throw std::invalid_argument("constrain_explanation needs a level-0 base");
  const std::size_t budget = word_budget(base.word_count, level);

  Explanation out;
  out.run_id = base.run_id;
  out.item_id = base.item_id;
  out.language = base.language;
  out.generator_model = base.generator_model;
  out.level = level;

  std::string last;
  std::size_t last_count = 0;
  const int attempts = 1 + std::max(0, options.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    RenderedPrompt prompt = attempt == 0
                                ? render_constrain(item, base, budget, level, templates)
                                : render_constrain_retry(item, base, budget, level, last_count, templates);
    auto result = gateway.generate(endpoint, prompt, options.params);
    last = extract_constrained_text(result.text);
    last_count = count_words(last, item.language);
    out.attempts = attempt + 1;
    if (last_count >= 1 && last_count <= budget) {
      out.text = std::move(last);
      out.word_count = last_count;
      out.length_status = LengthStatus::within_budget;
      return out;
    }
  }
  if (last_count == 0) {
    throw EmptyCompletion("empty constrained explanation for item '" + item.id + "' at level " + level.to_string());
  }
  out.text = truncate_words(last, budget);
  out.word_count = count_words(out.text, item.language);
  out.length_status = LengthStatus::truncated;
  return out;
}

Explanation generate_base_explanation(const QuestionItem& item, gateway::Gateway& gateway,
                                      const gateway::ModelEndpoint& endpoint, const PromptTemplateSet& templates,
                                      const gateway::GenerationParams& params) {
  auto result = gateway.generate(endpoint, render_generation(item, templates), params);
  Explanation out;
  out.item_id = item.id;
  out.language = item.language;
  out.generator_model = endpoint.model_id;
  out.level = Level(0);
  try {
    auto parsed = extract_answer_and_explanation(result);
    out.text = std::move(parsed.explanation);
    out.generator_label = parsed.label;
  } catch (const UnparseableOutput&) {
    out.text = text::nfc(text::trim(result.text));
    out.parse_status = ParseStatus::unparseable;
  }
  out.word_count = count_words(out.text, item.language);
  return out;
}

}  // namespace suffbench
