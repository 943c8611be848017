#include "suffbench/pipeline.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "suffbench/constrainer.hpp"
#include "suffbench/error.hpp"
#include "suffbench/hash.hpp"
#include "suffbench/kernels.hpp"
#include "suffbench/masker.hpp"
#include "suffbench/metrics.hpp"
#include "suffbench/scorer.hpp"

namespace suffbench {

namespace fs = std::filesystem;

namespace {

struct Interrupted : std::runtime_error {
  Interrupted() : std::runtime_error("run interrupted") {}
};

void check_stop(const std::atomic<bool>& stop) {
  if (stop.load()) throw Interrupted();
}

}  // namespace

RunInputs prepare_run(const RunConfig& config) {
  RunInputs in;
  in.config = config;
  RunManifest& m = in.manifest;
  for (const auto& c : config.corpora) {
    if (!fs::exists(c.path)) throw ConfigError("corpus file not found: " + c.path.string());
    Corpus corpus = load_corpus(c.path, c.language);
    if (corpus.empty()) throw CorpusError(c.path.string() + ": no items");
    m.corpora.push_back({c.path.string(), c.language, sha256_hex(read_file(c.path))});
    if (config.sample) corpus = subset(corpus, *config.sample, config.seed);
    in.templates.emplace(c.language, load_templates(config.templates_dir, config.template_id, c.language));
    in.corpora.push_back(std::move(corpus));
  }
  m.generators = config.generators;
  m.scorer = config.scorer;
  m.embedder = config.embedder;
  m.levels = config.levels;
  m.template_id = config.template_id;
  for (const auto& [lang, t] : in.templates) m.template_hashes[std::string(to_string(lang))] = t.content_hash();
  m.mask_rules_version = std::string(kMaskRulesVersion);
  m.retry = config.retry;
  m.seed = config.seed;
  m.sample = config.sample;
  m.constrain_retries = config.constrain_retries;
  m.generation = config.generation;
  m.run_id = config.run_id ? *config.run_id : "run-" + m.identity_hash().substr(0, 12);
  return in;
}

gateway::GatewayOptions gateway_options(const RunConfig& config) {
  gateway::GatewayOptions o;
  o.cache_dir = config.cache_dir;
  o.force_refresh = config.force_refresh;
  o.initial_backoff = std::chrono::milliseconds(config.retry.initial_backoff_ms);
  o.backoff_factor = config.retry.backoff_factor;
  o.max_backoff = std::chrono::milliseconds(config.retry.max_backoff_ms);
  return o;
}

Pipeline::Pipeline(RunInputs inputs, gateway::Gateway& gateway)
    : inputs_(std::move(inputs)), gateway_(gateway), store_(RunStore::open(inputs_.config.store, inputs_.manifest)) {
  for (const auto& corpus : inputs_.corpora) {
    for (const auto& it : corpus.items) items_[{it.language, it.id}] = &it;
  }
  if (store_.salvaged() > 0) spdlog::warn("salvaged {} partial record(s) in {}", store_.salvaged(), store_.dir().string());
}

const QuestionItem& Pipeline::item(Language lang, const std::string& id) const {
  auto it = items_.find({lang, id});
  if (it == items_.end()) throw StoreError("record for unknown item " + id);
  return *it->second;
}

const gateway::ModelEndpoint& Pipeline::generator(const std::string& model_id) const {
  for (const auto& g : inputs_.config.generators) {
    if (g.model_id == model_id) return g;
  }
  throw StoreError("record for unknown generator " + model_id);
}

std::map<WorkKey, Explanation> Pipeline::base_explanations() const {
  std::map<WorkKey, Explanation> out;
  for (auto& e : store_.explanations()) {
    if (e.level == Level(0) && items_.contains({e.language, e.item_id})) out.emplace(key_of(e), std::move(e));
  }
  return out;
}

std::vector<WorkKey> Pipeline::expected_keys(Stage stage) const {
  std::vector<WorkKey> keys;
  if (stage == Stage::generate) {
    for (const auto& corpus : inputs_.corpora) {
      for (const auto& it : corpus.items) {
        for (const auto& g : inputs_.config.generators) keys.push_back({it.language, it.id, g.model_id, Level(0)});
      }
    }
    return keys;
  }
  if (stage == Stage::aggregate) return keys;

  std::vector<Level> levels;
  if (stage == Stage::mask || stage == Stage::score) levels.emplace_back(0);
  for (Level v : inputs_.manifest.constraint_levels()) levels.push_back(v);
  for (const auto& [key, base] : base_explanations()) {
    if (base.parse_status != ParseStatus::ok) continue;
    for (Level v : levels) keys.push_back({key.language, key.item_id, key.generator_model, v});
  }
  if (stage == Stage::score) {
    for (const auto& corpus : inputs_.corpora) {
      for (const auto& it : corpus.items) {
        keys.push_back({it.language, it.id, std::string(kBaselineModel), Level::noexp()});
      }
    }
  }
  return keys;
}

bool Pipeline::stage_complete(Stage stage) const {
  if (stage == Stage::aggregate) return fs::exists(store_.file(Stage::aggregate));
  return store_.pending_work(stage, expected_keys(stage)).empty();
}

void Pipeline::recorded(Stage stage, const WorkKey& key) {
  if (on_record_) on_record_(stage, key);
}

StageSummary Pipeline::finish(Stage stage, const std::vector<WorkKey>& keys,
                              const std::vector<std::exception_ptr>& errors) {
  StageSummary summary{stage, keys.size(), 0, 0};
  std::string first;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) {
      ++summary.completed;
      continue;
    }
    ++summary.failed;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Interrupted&) {
      ++skipped;
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", to_string(stage), to_string(keys[i]), e.what());
      if (first.empty()) first = to_string(keys[i]) + ": " + e.what();
    }
  }
  if (skipped > 0) {
    spdlog::warn("{}: stop requested, {} items not started", to_string(stage), skipped);
    if (first.empty()) first = "run interrupted";
  }
  store_.canonicalize();
  spdlog::info("{}: {} done, {} failed", to_string(stage), summary.completed, summary.failed);
  if (summary.failed > 0) {
    throw StageFailure(fmt::format("stage {}: {} of {} items failed (first: {})", to_string(stage), summary.failed,
                                   keys.size(), first));
  }
  return summary;
}

StageSummary Pipeline::run_generate() {
  auto keys = store_.pending_work(Stage::generate, expected_keys(Stage::generate));
  spdlog::info("generate: {} pending", keys.size());
  auto errors = kernels::for_each_index(keys.size(), inputs_.config.concurrency, [&](std::size_t i) {
    check_stop(stop_);
    const WorkKey& k = keys[i];
    Explanation e = generate_base_explanation(item(k.language, k.item_id), gateway_, generator(k.generator_model),
                                              inputs_.templates.at(k.language), inputs_.config.generation);
    e.run_id = manifest().run_id;
    store_.append(e);
    recorded(Stage::generate, k);
  });
  return finish(Stage::generate, keys, errors);
}

StageSummary Pipeline::run_constrain() {
  auto keys = store_.pending_work(Stage::constrain, expected_keys(Stage::constrain));
  auto bases = base_explanations();
  spdlog::info("constrain: {} pending", keys.size());
  ConstrainOptions options{inputs_.config.constrain_retries, inputs_.config.generation};
  auto errors = kernels::for_each_index(keys.size(), inputs_.config.concurrency, [&](std::size_t i) {
    check_stop(stop_);
    const WorkKey& k = keys[i];
    const Explanation& base = bases.at({k.language, k.item_id, k.generator_model, Level(0)});
    Explanation e = constrain_explanation(item(k.language, k.item_id), base, k.level, gateway_,
                                          generator(k.generator_model), inputs_.templates.at(k.language), options);
    e.run_id = manifest().run_id;
    store_.append(e);
    recorded(Stage::constrain, k);
  });
  return finish(Stage::constrain, keys, errors);
}

StageSummary Pipeline::run_mask() {
  auto keys = store_.pending_work(Stage::mask, expected_keys(Stage::mask));
  std::map<WorkKey, Explanation> explanations;
  for (auto& e : store_.explanations()) explanations.emplace(key_of(e), std::move(e));
  spdlog::info("mask: {} pending", keys.size());
  auto errors = kernels::for_each_index(keys.size(), inputs_.config.concurrency, [&](std::size_t i) {
    check_stop(stop_);
    const WorkKey& k = keys[i];
    auto [masked, report] = mask_explanation(explanations.at(k), item(k.language, k.item_id));
    store_.append(report);
    recorded(Stage::mask, k);
  });
  return finish(Stage::mask, keys, errors);
}

StageSummary Pipeline::run_score() {
  auto keys = store_.pending_work(Stage::score, expected_keys(Stage::score));
  std::map<WorkKey, MaskReport> masks;
  for (auto& r : store_.masks()) masks.emplace(key_of(r), std::move(r));
  spdlog::info("score: {} pending", keys.size());

  // Logprobs are fetched in parallel per chunk, then one batched softmax.
  constexpr std::size_t kChunk = 64;
  std::vector<std::exception_ptr> errors(keys.size());
  const auto& scorer = inputs_.config.scorer;
  for (std::size_t start = 0; start < keys.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, keys.size() - start);
    std::vector<double> logits(n * 4, 0.0);
    std::vector<RenderedPrompt> prompts(n);
    std::vector<std::optional<Explanation>> explanations(n);
    auto chunk_errors = kernels::for_each_index(n, inputs_.config.concurrency, [&](std::size_t j) {
      check_stop(stop_);
      const WorkKey& k = keys[start + j];
      const QuestionItem& q = item(k.language, k.item_id);
      if (!k.level.is_noexp()) {
        const MaskReport& r = masks.at(k);
        Explanation e;
        e.run_id = r.run_id;
        e.item_id = r.item_id;
        e.language = r.language;
        e.generator_model = r.generator_model;
        e.level = r.level;
        e.text = r.masked_text;
        e.word_count = count_words(r.masked_text, r.language);
        e.masking = Masking::masked;
        explanations[j] = std::move(e);
      }
      prompts[j] = render_scoring(q, explanations[j], inputs_.templates.at(k.language));
      OptionLogprobs lp = option_logprobs(gateway_, scorer, prompts[j]);
      std::copy(lp.begin(), lp.end(), logits.begin() + static_cast<std::ptrdiff_t>(j * 4));
    });
    auto probs = kernels::softmax_rows_parallel(logits, 4);
    for (std::size_t j = 0; j < n; ++j) {
      const WorkKey& k = keys[start + j];
      if (chunk_errors[j]) {
        errors[start + j] = chunk_errors[j];
        continue;
      }
      try {
        OptionProbs p{probs[j * 4], probs[j * 4 + 1], probs[j * 4 + 2], probs[j * 4 + 3]};
        ScoreResult r = make_score_result(item(k.language, k.item_id), explanations[j], prompts[j], p, scorer.model_id);
        r.run_id = manifest().run_id;
        store_.append(r);
        recorded(Stage::score, k);
      } catch (...) {
        errors[start + j] = std::current_exception();
      }
    }
  }
  return finish(Stage::score, keys, errors);
}

StageSummary Pipeline::run_similarity() {
  auto keys = store_.pending_work(Stage::similarity, expected_keys(Stage::similarity));
  std::map<WorkKey, Explanation> explanations;
  for (auto& e : store_.explanations()) explanations.emplace(key_of(e), std::move(e));
  spdlog::info("similarity: {} pending", keys.size());

  // One task per (item, model): the base text is embedded once.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && keys[i].language == keys[i - 1].language && keys[i].item_id == keys[i - 1].item_id &&
        keys[i].generator_model == keys[i - 1].generator_model) {
      groups.back().push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  std::vector<std::vector<double>> base_vecs(keys.size()), level_vecs(keys.size());
  auto group_errors = kernels::for_each_index(groups.size(), inputs_.config.concurrency, [&](std::size_t g) {
    check_stop(stop_);
    const WorkKey& first = keys[groups[g].front()];
    const Explanation& base = explanations.at({first.language, first.item_id, first.generator_model, Level(0)});
    auto base_vec = gateway_.embed(inputs_.config.embedder, base.text).vector;
    for (std::size_t i : groups[g]) {
      level_vecs[i] = gateway_.embed(inputs_.config.embedder, explanations.at(keys[i]).text).vector;
      base_vecs[i] = base_vec;
    }
  });
  std::vector<std::exception_ptr> errors(keys.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i : groups[g]) errors[i] = group_errors[g];
  }

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!errors[i]) ok.push_back(i);
  }
  std::vector<double> cosines;
  if (!ok.empty()) {
    const std::size_t dim = base_vecs[ok.front()].size();
    std::vector<double> a, b;
    a.reserve(ok.size() * dim);
    b.reserve(ok.size() * dim);
    for (std::size_t i : ok) {
      a.insert(a.end(), base_vecs[i].begin(), base_vecs[i].end());
      b.insert(b.end(), level_vecs[i].begin(), level_vecs[i].end());
    }
    cosines = kernels::cosine_rows_parallel(a, b, dim);
  }
  for (std::size_t n = 0; n < ok.size(); ++n) {
    std::size_t i = ok[n];
    const WorkKey& k = keys[i];
    try {
      if (std::isnan(cosines[n])) throw std::invalid_argument("zero embedding vector");
      const Explanation& base = explanations.at({k.language, k.item_id, k.generator_model, Level(0)});
      const Explanation& constrained = explanations.at(k);
      SimilarityRecord r{manifest().run_id,
                         k.item_id,
                         k.language,
                         k.generator_model,
                         k.level,
                         cosines[n],
                         conciseness(k.level),
                         realized_reduction(base.word_count, constrained.word_count)};
      store_.append(r);
      recorded(Stage::similarity, k);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  return finish(Stage::similarity, keys, errors);
}

StageSummary Pipeline::run_aggregate() {
  auto scores = store_.scores();
  auto sims = store_.similarities();
  std::vector<Explanation> bases;
  for (auto& [k, e] : base_explanations()) bases.push_back(std::move(e));
  auto cells = aggregate({scores, sims, bases}, manifest().run_id);
  store_.write_aggregates(cells);
  spdlog::info("aggregate: {} cells", cells.size());
  return {Stage::aggregate, 1, 1, 0};
}

StageSummary Pipeline::run_stage(Stage stage) {
  for (Stage before : kStages) {
    if (before == stage) break;
    if (!stage_complete(before)) {
      throw StageOrderError(fmt::format("stage '{}' needs stage '{}' to be complete first", to_string(stage),
                                        to_string(before)));
    }
  }
  switch (stage) {
    case Stage::generate: return run_generate();
    case Stage::constrain: return run_constrain();
    case Stage::mask: return run_mask();
    case Stage::score: return run_score();
    case Stage::similarity: return run_similarity();
    case Stage::aggregate: return run_aggregate();
  }
  throw std::logic_error("unknown stage");
}

std::vector<StageSummary> Pipeline::run_all() {
  std::vector<StageSummary> out;
  for (Stage s : kStages) out.push_back(run_stage(s));
  return out;
}

DryRunSummary dry_run(const RunInputs& inputs, std::ostream& out) {
  DryRunSummary summary;
  auto emit = [&](const RenderedPrompt& p, Language lang, const std::string& model,
                  std::optional<std::size_t> budget) {
    nlohmann::json line = {{"kind", to_string(p.kind)},
                           {"language", to_string(lang)},
                           {"item_id", p.item_id},
                           {"model", model},
                           {"level", p.level.to_string()},
                           {"text", p.text}};
    if (budget) line["word_budget"] = *budget;
    out << line.dump() << '\n';
    ++summary.prompts;
  };

  std::map<WorkKey, Explanation> stored;
  if (auto m = RunStore::read_manifest(inputs.config.store);
      m && m->identity_hash() == inputs.manifest.identity_hash()) {
    for (auto& e : load_records<Explanation>(inputs.config.store / std::string(RunStore::file_name(Stage::generate)))) {
      stored.emplace(key_of(e), std::move(e));
    }
  }

  const auto levels = inputs.manifest.constraint_levels();
  for (const auto& corpus : inputs.corpora) {
    const auto& templates = inputs.templates.at(corpus.language);
    for (const auto& q : corpus.items) {
      for (const auto& g : inputs.config.generators) {
        emit(render_generation(q, templates), q.language, g.model_id, std::nullopt);
        auto base = stored.find({q.language, q.id, g.model_id, Level(0)});
        if (base == stored.end()) {
          summary.deferred += 2 * levels.size() + 1;
          continue;
        }
        if (base->second.parse_status != ParseStatus::ok) continue;
        emit(render_scoring(q, mask_explanation(base->second, q).first, templates), q.language, g.model_id,
             std::nullopt);
        for (Level v : levels) {
          std::size_t budget = word_budget(base->second.word_count, v);
          emit(render_constrain(q, base->second, budget, v, templates), q.language, g.model_id, budget);
          auto constrained = stored.find({q.language, q.id, g.model_id, v});
          if (constrained == stored.end()) {
            ++summary.deferred;
            continue;
          }
          emit(render_scoring(q, mask_explanation(constrained->second, q).first, templates), q.language, g.model_id,
               std::nullopt);
        }
      }
      emit(render_scoring(q, std::nullopt, templates), q.language, std::string(kBaselineModel), std::nullopt);
    }
  }
  return summary;
}

}  // namespace suffbench
