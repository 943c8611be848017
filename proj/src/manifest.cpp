#include "suffbench/manifest.hpp"

#include "suffbench/error.hpp"
#include "suffbench/hash.hpp"

namespace suffbench {

using json = nlohmann::json;

json endpoint_to_json(const gateway::ModelEndpoint& e) {
  return {{"base_url", e.base_url},
          {"model_id", e.model_id},
          {"api_key_ref", e.api_key_ref},
          {"max_retries", e.max_retries},
          {"requests_per_minute", e.requests_per_minute},
          {"timeout_ms", e.timeout.count()}};
}

gateway::ModelEndpoint endpoint_from_json(const json& j) {
  gateway::ModelEndpoint e;
  e.base_url = j.at("base_url").get<std::string>();
  e.model_id = j.at("model_id").get<std::string>();
  e.api_key_ref = j.value("api_key_ref", "");
  e.max_retries = j.value("max_retries", 3);
  e.requests_per_minute = j.value("requests_per_minute", 60);
  e.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60000));
  return e;
}

namespace {

json identity_json(const RunManifest& m) {
  json corpora = json::array();
  for (const auto& c : m.corpora) corpora.push_back({{"language", to_string(c.language)}, {"sha256", c.sha256}});
  json generators = json::array();
  for (const auto& g : m.generators) generators.push_back(endpoint_to_json(g));
  return {{"corpora", corpora},
          {"generators", generators},
          {"scorer", endpoint_to_json(m.scorer)},
          {"embedder", endpoint_to_json(m.embedder)},
          {"levels", m.levels},
          {"template_id", m.template_id},
          {"template_hashes", m.template_hashes},
          {"mask_rules_version", m.mask_rules_version},
          {"retry",
           {{"initial_backoff_ms", m.retry.initial_backoff_ms},
            {"backoff_factor", m.retry.backoff_factor},
            {"max_backoff_ms", m.retry.max_backoff_ms}}},
          {"seed", m.seed},
          {"sample", m.sample ? json(*m.sample) : json(nullptr)},
          {"constrain_retries", m.constrain_retries},
          {"generation", {{"temperature", m.generation.temperature}, {"max_tokens", m.generation.max_tokens}}}};
}

}  // namespace

json RunManifest::to_json() const {
  json j = identity_json(*this);
  j["run_id"] = run_id;
  j["created_at"] = created_at;
  j["identity_hash"] = identity_hash();
  json corpora_full = json::array();
  for (const auto& c : corpora) {
    corpora_full.push_back({{"path", c.path}, {"language", to_string(c.language)}, {"sha256", c.sha256}});
  }
  j["corpora"] = corpora_full;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.value("created_at", "");
    for (const auto& c : j.at("corpora")) {
      auto lang = parse_language(c.at("language").get<std::string>());
      if (!lang) throw StoreError("manifest: unknown corpus language");
      m.corpora.push_back({c.value("path", ""), *lang, c.at("sha256").get<std::string>()});
    }
    for (const auto& g : j.at("generators")) m.generators.push_back(endpoint_from_json(g));
    m.scorer = endpoint_from_json(j.at("scorer"));
    m.embedder = endpoint_from_json(j.at("embedder"));
    m.levels = j.at("levels").get<std::vector<int>>();
    m.template_id = j.at("template_id").get<std::string>();
    m.template_hashes = j.at("template_hashes").get<std::map<std::string, std::string>>();
    m.mask_rules_version = j.at("mask_rules_version").get<std::string>();
    const auto& r = j.at("retry");
    m.retry = {r.at("initial_backoff_ms").get<int>(), r.at("backoff_factor").get<double>(),
               r.at("max_backoff_ms").get<int>()};
    m.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("sample").is_null()) m.sample = j.at("sample").get<std::size_t>();
    m.constrain_retries = j.at("constrain_retries").get<int>();
    m.generation.temperature = j.at("generation").at("temperature").get<double>();
    m.generation.max_tokens = j.at("generation").at("max_tokens").get<int>();
    return m;
  } catch (const json::exception& e) {
    throw StoreError(std::string("malformed manifest: ") + e.what());
  }
}

std::string RunManifest::identity_hash() const { return sha256_hex(identity_json(*this).dump()); }

std::vector<Level> RunManifest::constraint_levels() const {
  std::vector<Level> out;
  for (int v : levels) {
    if (v > 0) out.emplace_back(v);
  }
  return out;
}

}  // namespace suffbench
