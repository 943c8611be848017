#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "suffbench/config.hpp"
#include "suffbench/corpus.hpp"
#include "suffbench/gateway/gateway.hpp"
#include "suffbench/prompts.hpp"
#include "suffbench/runstore.hpp"

namespace suffbench {

/// Corpora, templates and manifest for a config, loaded without touching
/// the network or the store.
struct RunInputs {
  RunConfig config;
  std::vector<Corpus> corpora;  // after sampling
  std::map<Language, PromptTemplateSet> templates;
  RunManifest manifest;
};

/// Loads and validates everything a run needs. Errors are ConfigError,
/// CorpusError or TemplateError.
RunInputs prepare_run(const RunConfig& config);

gateway::GatewayOptions gateway_options(const RunConfig& config);

struct StageSummary {
  Stage stage;
  std::size_t pending = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

struct DryRunSummary {
  std::size_t prompts = 0;
  std::size_t deferred = 0;  // constrain/score prompts waiting on level-0 output
};

class Pipeline {
 public:
  Pipeline(RunInputs inputs, gateway::Gateway& gateway);

  const RunManifest& manifest() const { return inputs_.manifest; }
  RunStore& store() { return store_; }

  /// Runs every stage in order; stops at the first failing stage.
  std::vector<StageSummary> run_all();

  /// Runs one stage. Throws StageOrderError if its predecessor is not
  /// complete and StageFailure if any work item fails.
  StageSummary run_stage(Stage stage);

  bool stage_complete(Stage stage) const;

  /// Expected work keys of a stage given what is already persisted.
  std::vector<WorkKey> expected_keys(Stage stage) const;

  /// Called after every persisted record, from worker threads.
  void on_record(std::function<void(Stage, const WorkKey&)> fn) { on_record_ = std::move(fn); }

  /// Workers skip items not yet started; the running stage then fails.
  void request_stop() { stop_.store(true); }

 private:
  StageSummary run_generate();
  StageSummary run_constrain();
  StageSummary run_mask();
  StageSummary run_score();
  StageSummary run_similarity();
  StageSummary run_aggregate();

  const QuestionItem& item(Language lang, const std::string& id) const;
  const gateway::ModelEndpoint& generator(const std::string& model_id) const;
  std::map<WorkKey, Explanation> base_explanations() const;
  void recorded(Stage stage, const WorkKey& key);
  StageSummary finish(Stage stage, const std::vector<WorkKey>& keys, const std::vector<std::exception_ptr>& errors);

  RunInputs inputs_;
  gateway::Gateway& gateway_;
  RunStore store_;
  std::map<std::pair<Language, std::string>, const QuestionItem*> items_;
  std::function<void(Stage, const WorkKey&)> on_record_;
  std::atomic<bool> stop_{false};
};

/// Renders every prompt a run would send, one JSON object per line, with no
/// network access. Constrain and score prompts are rendered only for items
/// whose level-0 explanation already sits in a matching store.
DryRunSummary dry_run(const RunInputs& inputs, std::ostream& out);

}  // namespace suffbench
