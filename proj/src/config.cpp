#include "suffbench/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "suffbench/error.hpp"

namespace suffbench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + std::string(where));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for '" + std::string(key) + "' in " + std::string(where));
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get<T>(obj, key, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

gateway::ModelEndpoint parse_endpoint(const json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"base_url", "model_id", "api_key_ref", "max_retries", "requests_per_minute", "timeout_ms"});
  gateway::ModelEndpoint e;
  e.base_url = get<std::string>(j, "base_url", where);
  e.model_id = get<std::string>(j, "model_id", where);
  e.api_key_ref = get_or<std::string>(j, "api_key_ref", "", where);
  e.max_retries = get_or<int>(j, "max_retries", e.max_retries, where);
  e.requests_per_minute = get_or<int>(j, "requests_per_minute", e.requests_per_minute, where);
  e.timeout = std::chrono::milliseconds(get_or<long long>(j, "timeout_ms", e.timeout.count(), where));
  e.validate();
  return e;
}

}  // namespace

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  reject_unknown(j, "config",
                 {"run_id", "corpora", "generators", "scorer", "embedder", "levels", "templates", "store", "cache_dir",
                  "force_refresh", "seed", "sample", "concurrency", "constrain_retries", "generation", "retry"});
  RunConfig c;
  if (j.contains("run_id") && !j["run_id"].is_null()) {
    c.run_id = get<std::string>(j, "run_id", "config");
    if (c.run_id->empty()) throw ConfigError("run_id must not be empty");
  }

  const json& corpora = j.contains("corpora") ? j["corpora"] : json();
  if (!corpora.is_array() || corpora.empty()) throw ConfigError("'corpora' must be a non-empty array");
  std::set<Language> seen_lang;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    std::string where = "corpora[" + std::to_string(i) + "]";
    reject_unknown(corpora[i], where, {"path", "language"});
    auto lang = parse_language(get<std::string>(corpora[i], "language", where));
    if (!lang) throw ConfigError(where + ": language must be 'en' or 'fa'");
    if (!seen_lang.insert(*lang).second) throw ConfigError(where + ": second corpus for the same language");
    c.corpora.push_back({resolve(base_dir, get<std::string>(corpora[i], "path", where)), *lang});
  }

  const json& generators = j.contains("generators") ? j["generators"] : json();
  if (!generators.is_array() || generators.empty()) throw ConfigError("'generators' must be a non-empty array");
  std::set<std::string> model_ids;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    auto e = parse_endpoint(generators[i], "generators[" + std::to_string(i) + "]");
    if (e.model_id == "baseline") throw ConfigError("generator model_id 'baseline' is reserved");
    if (!model_ids.insert(e.model_id).second) throw ConfigError("duplicate generator model_id " + e.model_id);
    c.generators.push_back(std::move(e));
  }
  if (!j.contains("scorer")) throw ConfigError("missing 'scorer'");
  c.scorer = parse_endpoint(j["scorer"], "scorer");
  if (!j.contains("embedder")) throw ConfigError("missing 'embedder'");
  c.embedder = parse_endpoint(j["embedder"], "embedder");

  if (j.contains("levels")) {
    c.levels = get<std::vector<int>>(j, "levels", "config");
    std::sort(c.levels.begin(), c.levels.end());
    if (std::adjacent_find(c.levels.begin(), c.levels.end()) != c.levels.end()) {
      throw ConfigError("duplicate entry in 'levels'");
    }
    for (int v : c.levels) {
      if (!Level(v).is_sweep_level()) throw ConfigError("level " + std::to_string(v) + " is not one of 0,10,...,90");
    }
    if (c.levels.empty() || c.levels.front() != 0) throw ConfigError("'levels' must include 0");
  }

  if (!j.contains("templates")) throw ConfigError("missing 'templates'");
  reject_unknown(j["templates"], "templates", {"dir", "id"});
  c.templates_dir = resolve(base_dir, get<std::string>(j["templates"], "dir", "templates"));
  c.template_id = get<std::string>(j["templates"], "id", "templates");

  c.store = resolve(base_dir, get<std::string>(j, "store", "config"));
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    c.cache_dir = resolve(base_dir, get<std::string>(j, "cache_dir", "config"));
  }
  c.force_refresh = get_or<bool>(j, "force_refresh", false, "config");
  c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
  if (j.contains("sample") && !j["sample"].is_null()) {
    auto n = get<long long>(j, "sample", "config");
    if (n < 1) throw ConfigError("'sample' must be >= 1");
    c.sample = static_cast<std::size_t>(n);
  }
  c.concurrency = get_or<int>(j, "concurrency", 4, "config");
  if (c.concurrency < 1) throw ConfigError("'concurrency' must be >= 1");
  c.constrain_retries = get_or<int>(j, "constrain_retries", 3, "config");
  if (c.constrain_retries < 0) throw ConfigError("'constrain_retries' must be >= 0");

  if (j.contains("generation")) {
    reject_unknown(j["generation"], "generation", {"temperature", "max_tokens"});
    c.generation.temperature = get_or<double>(j["generation"], "temperature", 0.0, "generation");
    c.generation.max_tokens = get_or<int>(j["generation"], "max_tokens", 512, "generation");
    if (c.generation.temperature < 0) throw ConfigError("generation.temperature must be >= 0");
    if (c.generation.max_tokens < 1) throw ConfigError("generation.max_tokens must be >= 1");
  }
  if (j.contains("retry")) {
    reject_unknown(j["retry"], "retry", {"initial_backoff_ms", "backoff_factor", "max_backoff_ms"});
    c.retry.initial_backoff_ms = get_or<int>(j["retry"], "initial_backoff_ms", 1000, "retry");
    c.retry.backoff_factor = get_or<double>(j["retry"], "backoff_factor", 2.0, "retry");
    c.retry.max_backoff_ms = get_or<int>(j["retry"], "max_backoff_ms", 30000, "retry");
    if (c.retry.initial_backoff_ms < 0 || c.retry.max_backoff_ms < 0 || c.retry.backoff_factor < 1.0) {
      throw ConfigError("retry delays must be >= 0 and backoff_factor >= 1");
    }
  }
  return c;
}

RunConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return parse_config(j, file.parent_path());
}

}  // namespace suffbench
