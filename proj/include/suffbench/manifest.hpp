#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "suffbench/gateway/gateway.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

struct CorpusRef {
  std::string path;
  Language language = Language::en;
  std::string sha256;

  friend bool operator==(const CorpusRef&, const CorpusRef&) = default;
};

struct RetrySettings {
  int initial_backoff_ms = 1000;
  double backoff_factor = 2.0;
  int max_backoff_ms = 30000;

  friend bool operator==(const RetrySettings&, const RetrySettings&) = default;
};

/// Frozen run configuration written to manifest.json.
struct RunManifest {
  std::string run_id;
  std::string created_at;  // ISO-8601 UTC
  std::vector<CorpusRef> corpora;
  std::vector<gateway::ModelEndpoint> generators;
  gateway::ModelEndpoint scorer;
  gateway::ModelEndpoint embedder;
  std::vector<int> levels;  // sorted, includes 0
  std::string template_id;
  std::map<std::string, std::string> template_hashes;  // language -> content hash
  std::string mask_rules_version;
  RetrySettings retry;
  std::uint64_t seed = 0;
  std::optional<std::size_t> sample;
  int constrain_retries = 3;
  gateway::GenerationParams generation;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  /// SHA-256 over everything that determines results. run_id, created_at
  /// and corpus paths are left out, so a moved corpus file with the same
  /// content still resumes.
  std::string identity_hash() const;

  /// Levels above 0.
  std::vector<Level> constraint_levels() const;
};

nlohmann::json endpoint_to_json(const gateway::ModelEndpoint& e);
gateway::ModelEndpoint endpoint_from_json(const nlohmann::json& j);

}  // namespace suffbench
