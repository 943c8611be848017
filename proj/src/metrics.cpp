#include "suffbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "suffbench/error.hpp"

namespace suffbench {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double conciseness(Level level) {
  if (!level.is_sweep_level()) throw std::invalid_argument("conciseness needs a level in 0..90");
  return level.percent() / 100.0;
}

double realized_reduction(std::size_t base_words, std::size_t constrained_words) {
  if (base_words == 0) throw std::invalid_argument("realized reduction of an empty base");
  return 1.0 - static_cast<double>(constrained_words) / static_cast<double>(base_words);
}

namespace {

using CellKey = std::tuple<Language, std::string, Level>;

void check_run(const std::string& record_run, const std::string& run_id, std::string_view what) {
  if (record_run != run_id) {
    throw StoreError("mixed-manifest records: " + std::string(what) + " from run '" + record_run +
                     "' in aggregate for run '" + run_id + "'");
  }
}

}  // namespace

std::vector<AggregateCell> aggregate(const AggregateInput& input, const std::string& run_id) {
  std::set<std::tuple<Language, std::string, std::string>> excluded;  // (lang, model, item)
  std::map<std::pair<Language, std::string>, std::size_t> n_excluded;
  for (const auto& e : input.base_explanations) {
    check_run(e.run_id, run_id, "explanation");
    if (e.level == Level(0) && e.parse_status == ParseStatus::unparseable) {
      if (excluded.emplace(e.language, e.generator_model, e.item_id).second) {
        ++n_excluded[{e.language, e.generator_model}];
      }
    }
  }
  auto is_excluded = [&](Language lang, const std::string& model, const std::string& item) {
    return excluded.contains({lang, model, item});
  };

  // Group by cell, then by item id so summation order is fixed.
  std::map<CellKey, std::map<std::string, const ScoreResult*>> score_groups;
  for (const auto& s : input.scores) {
    check_run(s.run_id, run_id, "score");
    if (is_excluded(s.language, s.generator_model, s.item_id)) continue;
    score_groups[{s.language, s.generator_model, s.level}].emplace(s.item_id, &s);
  }
  std::map<CellKey, std::map<std::string, double>> sim_groups;
  for (const auto& r : input.similarities) {
    check_run(r.run_id, run_id, "similarity");
    if (is_excluded(r.language, r.generator_model, r.item_id)) continue;
    sim_groups[{r.language, r.generator_model, r.level}].emplace(r.item_id, r.cosine);
  }

  std::vector<AggregateCell> cells;
  for (const auto& [key, by_item] : score_groups) {
    const auto& [lang, model, level] = key;
    AggregateCell cell;
    cell.run_id = run_id;
    cell.generator_model = model;
    cell.language = lang;
    cell.level = level;
    cell.n_items = by_item.size();
    double correct = 0.0, suff = 0.0;
    for (const auto& [id, s] : by_item) {
      correct += s->correct ? 1.0 : 0.0;
      suff += s->sufficiency;
    }
    cell.accuracy = correct / static_cast<double>(cell.n_items);
    cell.mean_sufficiency = suff / static_cast<double>(cell.n_items);
    if (!level.is_noexp()) {
      auto it = n_excluded.find({lang, model});
      cell.n_excluded = it == n_excluded.end() ? 0 : it->second;
      auto sim = sim_groups.find(key);
      if (sim != sim_groups.end() && !sim->second.empty()) {
        double total = 0.0;
        for (const auto& [id, c] : sim->second) total += c;
        cell.mean_similarity = total / static_cast<double>(sim->second.size());
      }
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

HeatmapMatrix heatmap_matrix(std::span<const SimilarityRecord> records) {
  HeatmapMatrix m;
  for (int v = 10; v <= 90; v += 10) m.levels.push_back(v);
  std::map<std::string, std::map<int, std::map<std::pair<Language, std::string>, double>>> groups;
  for (const auto& r : records) groups[r.generator_model][r.level.percent()][{r.language, r.item_id}] = r.cosine;
  for (const auto& [model, by_level] : groups) {
    m.models.push_back(model);
    std::vector<std::optional<double>> row(m.levels.size());
    for (std::size_t j = 0; j < m.levels.size(); ++j) {
      auto it = by_level.find(m.levels[j]);
      if (it == by_level.end() || it->second.empty()) continue;
      double total = 0.0;
      for (const auto& [k, c] : it->second) total += c;
      row[j] = total / static_cast<double>(it->second.size());
    }
    m.values.push_back(std::move(row));
  }
  return m;
}

}  // namespace suffbench
