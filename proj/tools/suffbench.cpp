#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "suffbench/config.hpp"
#include "suffbench/error.hpp"
#include "suffbench/gateway/gateway.hpp"
#include "suffbench/pipeline.hpp"
#include "suffbench/report.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kStage = 3, kManifest = 4 };

using namespace suffbench;

int cmd_run(const std::string& config_path, const std::string& stage_name, std::optional<std::size_t> sample,
            std::optional<std::uint64_t> seed, bool dry) {
  RunConfig config = load_config(config_path);
  if (sample) {
    if (*sample == 0) throw ConfigError("--sample must be >= 1");
    config.sample = sample;
  }
  if (seed) config.seed = *seed;
  std::optional<Stage> stage;
  if (!stage_name.empty()) {
    stage = parse_stage(stage_name);
    if (!stage) throw ConfigError("unknown stage '" + stage_name + "'");
  }
  RunInputs inputs = prepare_run(config);

  if (dry) {
    auto summary = dry_run(inputs, std::cout);
    spdlog::info("dry run: {} prompts rendered, {} waiting on level-0 output", summary.prompts, summary.deferred);
    return kOk;
  }

  gateway::Gateway gateway(gateway_options(config));
  Pipeline pipeline(std::move(inputs), gateway);
  spdlog::info("run {} -> {}", pipeline.manifest().run_id, pipeline.store().dir().string());
  auto log_stats = [&] {
    auto s = gateway.stats();
    spdlog::info("requests: generate={} score={} embed={} network={} cache_hits={}", s.generate_calls,
                 s.score_calls, s.embed_calls, s.network_requests, s.cache_hits);
  };
  try {
    if (stage) {
      pipeline.run_stage(*stage);
    } else {
      pipeline.run_all();
    }
  } catch (...) {
    log_stats();
    throw;
  }
  log_stats();
  return kOk;
}

int cmd_report(const std::string& store_dir, const std::string& kind_name) {
  auto kind = parse_report_kind(kind_name);
  if (!kind) throw ConfigError("unknown report kind '" + kind_name + "'");
  RunStore store = RunStore::open_existing(store_dir);
  for (const auto& path : write_report(store, *kind)) std::cout << path.string() << '\n';
  return kOk;
}

int cmd_validate(const std::string& config_path) {
  RunInputs inputs = prepare_run(load_config(config_path));
  std::size_t items = 0;
  for (const auto& c : inputs.corpora) items += c.size();
  std::cout << "ok: run " << inputs.manifest.run_id << ", " << inputs.corpora.size() << " corpora, " << items
            << " items, " << inputs.config.generators.size() << " generators, " << inputs.manifest.levels.size()
            << " levels\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("suffbench"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

  CLI::App app{"Explanation sufficiency benchmark harness"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run pipeline stages");
  std::string config_path, stage_name;
  bool all = false, dry = false;
  std::optional<std::size_t> sample;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "Run config JSON")->required();
  auto* all_flag = run->add_flag("--all", all, "Run every stage (default)");
  run->add_option("--stage", stage_name, "generate, constrain, mask, score, similarity or aggregate")
      ->excludes(all_flag);
  run->add_option("--sample", sample, "Sample N items per corpus");
  run->add_option("--seed", seed, "Sampling seed");
  run->add_flag("--dry-run", dry, "Render prompts and budgets without network calls");

  auto* report = app.add_subcommand("report", "Write reports from a finished store");
  std::string store_dir, kind_name;
  report->add_option("--store", store_dir, "Run store directory")->required();
  report->add_option("--kind", kind_name, "tables, heatmap or curves")->required();

  auto* validate = app.add_subcommand("validate-config", "Check a config without running anything");
  std::string validate_path;
  validate->add_option("file", validate_path, "Run config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config_path, stage_name, sample, seed, dry);
    if (*report) return cmd_report(store_dir, kind_name);
    if (*validate) return cmd_validate(validate_path);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const CorpusError& e) {
    spdlog::error("corpus: {}", e.what());
    return kConfig;
  } catch (const TemplateError& e) {
    spdlog::error("templates: {}", e.what());
    return kConfig;
  } catch (const ManifestMismatch& e) {
    spdlog::error("resume refused: {}", e.what());
    return kManifest;
  } catch (const StageOrderError& e) {
    spdlog::error("stage order: {}", e.what());
    return kStage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kStage;
  }
  return kOk;
}
