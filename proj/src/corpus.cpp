#include "suffbench/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "suffbench/error.hpp"
#include "suffbench/text.hpp"

namespace suffbench {

using json = nlohmann::json;

namespace {

// ARC uses both letter and digit labels; digits map to letters by position.
std::optional<Label> normalize_label(const std::string& raw) {
  if (raw.size() != 1) return std::nullopt;
  char c = raw[0];
  if (c >= 'A' && c <= 'D') return static_cast<Label>(c - 'A');
  if (c >= '1' && c <= '4') return static_cast<Label>(c - '1');
  return std::nullopt;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw CorpusError(source + ":" + std::to_string(line) + ": " + what);
}

QuestionItem parse_record(const json& rec, Language language, const std::string& source, std::size_t line) {
  if (!rec.is_object()) fail(source, line, "record is not a JSON object");
  QuestionItem item;
  item.language = language;

  auto id = rec.find("id");
  if (id == rec.end() || !id->is_string() || id->get<std::string>().empty()) {
    fail(source, line, "missing or empty string field 'id'");
  }
  item.id = id->get<std::string>();

  auto q = rec.find("question");
  if (q == rec.end() || !q->is_object()) fail(source, line, "missing object field 'question'");
  auto stem = q->find("stem");
  if (stem == q->end() || !stem->is_string()) fail(source, line, "missing string field 'question.stem'");
  item.stem = text::nfc(stem->get<std::string>());
  if (text::trim(item.stem).empty()) fail(source, line, "empty question stem");

  auto choices = q->find("choices");
  if (choices == q->end() || !choices->is_array()) fail(source, line, "missing array field 'question.choices'");
  if (choices->size() != 4) {
    fail(source, line, "expected exactly 4 choices, found " + std::to_string(choices->size()));
  }
  std::array<bool, 4> seen{};
  for (const auto& choice : *choices) {
    if (!choice.is_object() || !choice.contains("label") || !choice.contains("text") ||
        !choice["label"].is_string() || !choice["text"].is_string()) {
      fail(source, line, "choice must have string 'label' and 'text'");
    }
    auto label = normalize_label(choice["label"].get<std::string>());
    if (!label) fail(source, line, "choice label '" + choice["label"].get<std::string>() + "' outside A-D/1-4");
    if (seen[index_of(*label)]) fail(source, line, "duplicate choice label");
    seen[index_of(*label)] = true;
    std::string option = text::nfc(choice["text"].get<std::string>());
    if (text::trim(option).empty()) fail(source, line, "empty option text");
    item.options[index_of(*label)] = std::move(option);
  }

  auto key = rec.find("answerKey");
  if (key == rec.end() || !key->is_string()) fail(source, line, "missing string field 'answerKey'");
  auto gold = normalize_label(key->get<std::string>());
  if (!gold) fail(source, line, "answerKey '" + key->get<std::string>() + "' outside A-D after normalization");
  item.gold = *gold;
  return item;
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl, Language language, std::string source) {
  Corpus corpus;
  corpus.language = language;
  corpus.source_path = std::move(source);
  std::unordered_set<std::string> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(corpus.source_path, line_no, std::string("malformed JSON: ") + e.what());
    }
    QuestionItem item = parse_record(rec, language, corpus.source_path, line_no);
    if (!ids.insert(item.id).second) fail(corpus.source_path, line_no, "duplicate id '" + item.id + "'");
    corpus.items.push_back(std::move(item));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, Language language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw CorpusError("cannot read corpus file: " + path.string());
  return parse_corpus(buf.str(), language, path.string());
}

Corpus subset(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("subset size must be >= 1");
  const std::size_t total = corpus.items.size();
  const std::size_t k = std::min(n, total);

  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());

  Corpus out;
  out.language = corpus.language;
  out.source_path = corpus.source_path;
  out.items.reserve(k);
  for (std::size_t i : idx) out.items.push_back(corpus.items[i]);
  return out;
}

}  // namespace suffbench
