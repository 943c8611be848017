#include "suffbench/prompts.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "suffbench/error.hpp"
#include "suffbench/hash.hpp"
#include "suffbench/masker.hpp"

namespace suffbench {

namespace {

using Bindings = std::map<std::string, std::string, std::less<>>;

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Walks a template, calling on_text for literal runs and on_name for placeholders.
template <typename OnText, typename OnName>
void scan_template(std::string_view tmpl, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      on_text(std::string_view("{"));
      i += 2;
    } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      on_text(std::string_view("}"));
      i += 2;
    } else if (c == '{') {
      std::size_t close = tmpl.find('}', i + 1);
      if (close == std::string_view::npos) throw TemplateError("unterminated placeholder in template");
      std::string_view name = tmpl.substr(i + 1, close - i - 1);
      if (name.empty()) throw TemplateError("empty placeholder in template");
      for (char n : name) {
        if (!is_name_char(n)) throw TemplateError("malformed placeholder '{" + std::string(name) + "}'");
      }
      on_name(name);
      i = close + 1;
    } else if (c == '}') {
      throw TemplateError("unmatched '}' in template");
    } else {
      std::size_t next = tmpl.find_first_of("{}", i);
      if (next == std::string_view::npos) next = tmpl.size();
      on_text(tmpl.substr(i, next - i));
      i = next;
    }
  }
}

void check_placeholders(std::string_view tmpl, std::string_view what, const std::set<std::string, std::less<>>& allowed) {
  scan_template(
      tmpl, [](std::string_view) {},
      [&](std::string_view name) {
        if (!allowed.contains(name)) {
          throw TemplateError(std::string(what) + " template uses unbound placeholder '{" + std::string(name) + "}'");
        }
      });
}

std::string read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("cannot open template file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

void require_language(const QuestionItem& item, const PromptTemplateSet& templates) {
  if (item.language != templates.language) {
    throw TemplateError("item '" + item.id + "' is " + std::string(to_string(item.language)) +
                        " but templates '" + templates.template_id + "' are " +
                        std::string(to_string(templates.language)));
  }
}

Bindings constrain_bindings(const QuestionItem& item, const Explanation& base, std::size_t word_budget) {
  if (!base.level.is_sweep_level() || base.level.percent() != 0) {
    throw std::invalid_argument("constrain prompt needs a level-0 base explanation");
  }
  if (word_budget < 1) throw std::invalid_argument("word budget must be >= 1");
  return {{"stem", item.stem},
          {"options", format_options(item)},
          {"base_explanation", base.text},
          {"word_budget", std::to_string(word_budget)}};
}

}  // namespace

std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::generate:
      return "generate";
    case PromptKind::constrain:
      return "constrain";
    case PromptKind::score:
      return "score";
    case PromptKind::baseline:
      return "baseline";
  }
  return "?";
}

std::string substitute(std::string_view tmpl, const Bindings& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  scan_template(
      tmpl, [&](std::string_view s) { out.append(s); },
      [&](std::string_view name) {
        auto it = values.find(name);
        if (it == values.end()) throw TemplateError("unbound placeholder '{" + std::string(name) + "}'");
        out.append(it->second);
      });
  return out;
}

void PromptTemplateSet::validate() const {
  check_placeholders(generation_template, "generation", {"stem", "options"});
  check_placeholders(constrain_template, "constrain", {"stem", "options", "base_explanation", "word_budget"});
  check_placeholders(retry_template, "retry", {"word_budget", "word_count"});
  check_placeholders(scoring_template, "scoring", {"stem", "explanation", "options"});
  check_placeholders(baseline_template, "baseline", {"stem", "options"});
  for (auto [tmpl, what] : {std::pair{&scoring_template, "scoring"}, std::pair{&baseline_template, "baseline"}}) {
    if (!tmpl->ends_with(kAnswerSuffix)) {
      throw TemplateError(std::string(what) + " template must end with \"The answer is \"");
    }
  }
  if (generation_template.empty() || constrain_template.empty()) {
    throw TemplateError("generation and constrain templates must be non-empty");
  }
}

std::string PromptTemplateSet::content_hash() const {
  std::string blob;
  for (const auto* t : {&generation_template, &constrain_template, &retry_template, &scoring_template,
                        &baseline_template}) {
    blob += std::to_string(t->size());
    blob += ':';
    blob += *t;
  }
  return sha256_hex(blob);
}

PromptTemplateSet load_templates(const std::filesystem::path& root, const std::string& template_id,
                                 Language language) {
  const auto dir = root / template_id;
  const std::string lang(to_string(language));
  auto file = [&](std::string_view kind) { return dir / (std::string(kind) + "." + lang + ".txt"); };

  PromptTemplateSet set;
  set.template_id = template_id;
  set.language = language;
  set.generation_template = read_template(file("generate"));
  set.constrain_template = read_template(file("constrain"));
  set.retry_template = read_template(file("retry"));
  set.scoring_template = read_template(file("score"));
  set.baseline_template = read_template(file("baseline"));
  set.validate();
  return set;
}

std::string format_options(const QuestionItem& item) {
  std::string out;
  for (Label l : kLabels) {
    if (!out.empty()) out.push_back('\n');
    out.push_back(to_char(l));
    out.append(". ");
    out.append(item.option(l));
  }
  return out;
}

RenderedPrompt render_generation(const QuestionItem& item, const PromptTemplateSet& templates) {
  require_language(item, templates);
  RenderedPrompt p;
  p.kind = PromptKind::generate;
  p.text = substitute(templates.generation_template, {{"stem", item.stem}, {"options", format_options(item)}});
  p.item_id = item.id;
  p.level = Level(0);
  p.template_id = templates.template_id;
  return p;
}

RenderedPrompt render_constrain(const QuestionItem& item, const Explanation& base, std::size_t word_budget,
                                Level level, const PromptTemplateSet& templates) {
  require_language(item, templates);
  RenderedPrompt p;
  p.kind = PromptKind::constrain;
  p.text = substitute(templates.constrain_template, constrain_bindings(item, base, word_budget));
  p.item_id = item.id;
  p.level = level;
  p.template_id = templates.template_id;
  return p;
}

RenderedPrompt render_constrain_retry(const QuestionItem& item, const Explanation& base, std::size_t word_budget,
                                      Level level, std::size_t previous_word_count,
                                      const PromptTemplateSet& templates) {
  RenderedPrompt p = render_constrain(item, base, word_budget, level, templates);
  p.text += "\n\n";
  p.text += substitute(templates.retry_template, {{"word_budget", std::to_string(word_budget)},
                                                  {"word_count", std::to_string(previous_word_count)}});
  return p;
}

RenderedPrompt render_scoring(const QuestionItem& item, const std::optional<Explanation>& explanation,
                              const PromptTemplateSet& templates) {
  require_language(item, templates);
  RenderedPrompt p;
  p.item_id = item.id;
  p.template_id = templates.template_id;
  if (explanation) {
    if (explanation->masking != Masking::masked) {
      throw LeakHazard("explanation for item '" + item.id + "' is not masked");
    }
    if (!verify_masked(explanation->text, item)) {
      throw LeakHazard("explanation for item '" + item.id + "' still leaks an option label or text");
    }
    p.kind = PromptKind::score;
    p.level = explanation->level;
    p.text = substitute(templates.scoring_template,
                        {{"stem", item.stem}, {"explanation", explanation->text}, {"options", format_options(item)}});
  } else {
    p.kind = PromptKind::baseline;
    p.level = Level::noexp();
    p.text = substitute(templates.baseline_template, {{"stem", item.stem}, {"options", format_options(item)}});
  }
  return p;
}

}  // namespace suffbench
