#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "suffbench/types.hpp"

namespace suffbench {

/// One four-option multiple-choice item. Options are indexed by Label.
struct QuestionItem {
  std::string id;
  std::string stem;
  std::array<std::string, 4> options;
  Label gold = Label::A;
  Language language = Language::en;

  const std::string& option(Label l) const { return options[index_of(l)]; }

  friend bool operator==(const QuestionItem&, const QuestionItem&) = default;
};

/// Validated, immutable list of items in file order.
struct Corpus {
  Language language = Language::en;
  std::vector<QuestionItem> items;
  std::string source_path;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Loads an ARC-format JSONL file. Labels "1".."4" are remapped to A..D by
/// choice order; all text is NFC-normalized. Throws CorpusError with the
/// 1-based line number on any malformed or invalid record.
Corpus load_corpus(const std::filesystem::path& path, Language language);

/// Parses ARC JSONL already in memory. `source` names the input in errors.
Corpus parse_corpus(std::string_view jsonl, Language language, std::string source);

/// Deterministic sample of min(n, size) items, kept in original order.
///
/// Sampling: seed std::mt19937_64 with `seed`, run a partial Fisher-Yates
/// shuffle over the index list (step i swaps i with i + r % (N - i)), keep
/// the first n indices and sort them. tests/oracles/subset_oracle.py is an
/// independent reference of the same procedure.
Corpus subset(const Corpus& corpus, std::size_t n, std::uint64_t seed);

}  // namespace suffbench
