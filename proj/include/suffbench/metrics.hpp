#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suffbench/scorer.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

/// Cosine between the raw level-0 and raw level-v explanation embeddings of one (item, model).
struct SimilarityRecord {
  std::string run_id;
  std::string item_id;
  Language language = Language::en;
  std::string generator_model;
  Level level{10};
  double cosine = 0.0;
  double enforced_reduction = 0.0;  // v / 100
  double realized_reduction = 0.0;  // 1 - words(level v) / words(level 0)

  friend bool operator==(const SimilarityRecord&, const SimilarityRecord&) = default;
};

struct AggregateCell {
  std::string run_id;
  std::string generator_model;  // "baseline" for the no-explanation cells
  Language language = Language::en;
  Level level{0};
  double accuracy = 0.0;
  double mean_sufficiency = 0.0;
  std::optional<double> mean_similarity;
  std::size_t n_items = 0;
  std::size_t n_excluded = 0;

  friend bool operator==(const AggregateCell&, const AggregateCell&) = default;
};

/// u.v / (|u||v|), clamped to [-1, 1]. Throws DimensionMismatch on unequal
/// sizes and std::invalid_argument on a zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

/// Enforced reduction v/100 for v in {0,10,...,90}.
double conciseness(Level level);

/// Realized reduction 1 - constrained_words / base_words.
double realized_reduction(std::size_t base_words, std::size_t constrained_words);

struct AggregateInput {
  std::span<const ScoreResult> scores;
  std::span<const SimilarityRecord> similarities;
  // Level-0 explanations; unparseable ones exclude the item for that model at every level.
  std::span<const Explanation> base_explanations;
};

/// One cell per (model, language, level) present in the scores, plus the
/// baseline cells per language. Sums run in item-id order, so the result does
/// not depend on input order. Throws StoreError when any record's run_id
/// differs from `run_id`.
std::vector<AggregateCell> aggregate(const AggregateInput& input, const std::string& run_id);

/// Mean cosine per (model, level 10..90); missing cells stay empty.
struct HeatmapMatrix {
  std::vector<std::string> models;
  std::vector<int> levels;
  std::vector<std::vector<std::optional<double>>> values;  // [model][level]
};

HeatmapMatrix heatmap_matrix(std::span<const SimilarityRecord> records);

}  // namespace suffbench
