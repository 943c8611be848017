#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "suffbench/gateway/gateway.hpp"
#include "suffbench/manifest.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

struct CorpusConfig {
  std::filesystem::path path;
  Language language = Language::en;
};

/// Config-file image of the run manifest inputs. Relative paths resolve
/// against the config file's directory.
struct RunConfig {
  std::optional<std::string> run_id;
  std::vector<CorpusConfig> corpora;
  std::vector<gateway::ModelEndpoint> generators;
  gateway::ModelEndpoint scorer;
  gateway::ModelEndpoint embedder;
  std::vector<int> levels{0, 10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::filesystem::path templates_dir;
  std::string template_id;
  std::filesystem::path store;
  std::optional<std::filesystem::path> cache_dir;
  bool force_refresh = false;
  std::uint64_t seed = 0;
  std::optional<std::size_t> sample;
  int concurrency = 4;
  int constrain_retries = 3;
  gateway::GenerationParams generation;
  RetrySettings retry;
};

/// Validates and converts a parsed config. Unknown keys, wrong types and
/// out-of-range values raise ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

RunConfig load_config(const std::filesystem::path& file);

}  // namespace suffbench
