#include "suffbench/gateway/gateway.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <stdexcept>

#include "suffbench/error.hpp"
#include "suffbench/gateway/mock_backend.hpp"
#include "suffbench/hash.hpp"
#include "suffbench/text.hpp"

namespace suffbench::gateway {

using json = nlohmann::json;

namespace {

constexpr std::string_view kChatPath = "/chat/completions";
constexpr std::string_view kCompletionsPath = "/completions";
constexpr std::string_view kEmbeddingsPath = "/embeddings";

std::unique_ptr<Transport> default_transport(const ModelEndpoint& endpoint) {
  if (is_mock_url(endpoint.base_url)) return make_mock_transport(MockOptions::parse(endpoint.base_url));
  if (endpoint.base_url.starts_with("http://") || endpoint.base_url.starts_with("https://")) {
    return make_http_transport(endpoint.base_url);
  }
  throw ConfigError("unsupported base_url scheme: " + endpoint.base_url);
}

json parse_body(const std::string& body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string(what) + " response is not JSON: " + e.what());
  }
}

FinishReason parse_finish_reason(const json& v) {
  if (!v.is_string()) return FinishReason::other;
  auto s = v.get<std::string>();
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  return FinishReason::other;
}

GenerationResult parse_generation(const std::string& body, std::string fingerprint) {
  json resp = parse_body(body, "chat completion");
  if (!resp.contains("choices") || !resp["choices"].is_array() || resp["choices"].empty()) {
    throw ProtocolError("chat completion response has no choices");
  }
  const json& choice = resp["choices"][0];
  GenerationResult out;
  out.request_fingerprint = std::move(fingerprint);
  if (choice.contains("message") && choice["message"].contains("content") && choice["message"]["content"].is_string()) {
    out.text = choice["message"]["content"].get<std::string>();
  }
  out.finish_reason = parse_finish_reason(choice.value("finish_reason", json()));
  if (text::trim(out.text).empty()) throw EmptyCompletion("model returned an empty completion");
  return out;
}

std::vector<double> parse_embedding(const std::string& body) {
  json resp = parse_body(body, "embedding");
  if (!resp.contains("data") || !resp["data"].is_array() || resp["data"].empty() ||
      !resp["data"][0].contains("embedding") || !resp["data"][0]["embedding"].is_array()) {
    throw ProtocolError("embedding response has no data[0].embedding");
  }
  std::vector<double> vec;
  for (const auto& x : resp["data"][0]["embedding"]) {
    if (!x.is_number()) throw ProtocolError("embedding contains a non-number");
    vec.push_back(x.get<double>());
  }
  if (vec.empty()) throw ProtocolError("embedding is empty");
  return vec;
}

}  // namespace

void ModelEndpoint::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
  if (model_id.empty()) throw ConfigError("endpoint model_id is empty");
  if (requests_per_minute < 1) throw ConfigError("requests_per_minute must be >= 1 for " + model_id);
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0 for " + model_id);
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive for " + model_id);
}

struct Gateway::EndpointState {
  std::unique_ptr<Transport> transport;
  RateLimiter limiter;
  RetryPolicy retry;

  EndpointState(std::unique_ptr<Transport> t, int rpm, std::shared_ptr<Clock> clock, RetryPolicy r)
      : transport(std::move(t)), limiter(rpm, std::move(clock)), retry(r) {}
};

Gateway::Gateway(GatewayOptions options) : options_(std::move(options)) {
  if (!options_.clock) options_.clock = std::make_shared<SteadyClock>();
  if (!options_.transport_factory) options_.transport_factory = default_transport;
  if (options_.cache_dir) cache_ = std::make_unique<ResponseCache>(*options_.cache_dir);
}

Gateway::~Gateway() = default;

std::string Gateway::fingerprint(const ModelEndpoint& endpoint, std::string_view path,
                                 const std::string& canonical_body) {
  json canonical = {{"url", endpoint.base_url + std::string(path)}, {"body", json::parse(canonical_body)}};
  return sha256_hex(canonical.dump());
}

Gateway::EndpointState& Gateway::state_for(const ModelEndpoint& endpoint) {
  std::lock_guard lock(mu_);
  auto it = endpoints_.find(endpoint.key());
  if (it == endpoints_.end()) {
    RetryPolicy retry{endpoint.max_retries, options_.initial_backoff, options_.backoff_factor, options_.max_backoff};
    auto state = std::make_unique<EndpointState>(options_.transport_factory(endpoint), endpoint.requests_per_minute,
                                                 options_.clock, retry);
    it = endpoints_.emplace(endpoint.key(), std::move(state)).first;
  }
  return *it->second;
}

std::string Gateway::post(const ModelEndpoint& endpoint, std::string_view path, const std::string& body,
                          const std::string& cache_key, bool& from_cache) {
  endpoint.validate();
  from_cache = false;
  if (cache_ && !options_.force_refresh) {
    if (auto hit = cache_->get(cache_key)) {
      ++cache_hits_;
      from_cache = true;
      return *hit;
    }
  }

  EndpointState& state = state_for(endpoint);
  Headers headers;
  if (!endpoint.api_key_ref.empty() && !is_mock_url(endpoint.base_url)) {
    const char* key = std::getenv(endpoint.api_key_ref.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable " + endpoint.api_key_ref + " is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }

  return with_retries(state.retry, *options_.clock, [&] {
    state.limiter.acquire();
    ++network_requests_;
    HttpResponse resp = state.transport->post_json(path, body, headers, endpoint.timeout);
    if (resp.status < 200 || resp.status >= 300) throw HttpError(resp.status, resp.body);
    return resp.body;
  });
}

void Gateway::record_success(const std::string& cache_key, const std::string& payload) {
  if (cache_) cache_->put(cache_key, payload);
}

GenerationResult Gateway::generate(const ModelEndpoint& endpoint, const RenderedPrompt& prompt,
                                   const GenerationParams& params) {
  ++generate_calls_;
  json body = {{"model", endpoint.model_id},
               {"messages", {{{"role", "user"}, {"content", prompt.text}}}},
               {"temperature", params.temperature},
               {"max_tokens", params.max_tokens}};
  std::string payload = body.dump();
  std::string fp = fingerprint(endpoint, kChatPath, payload);
  bool from_cache = false;
  std::string response = post(endpoint, kChatPath, payload, fp, from_cache);
  GenerationResult result = parse_generation(response, fp);
  if (!from_cache) record_success(fp, response);
  return result;
}

LogprobResult extract_continuation_logprobs(std::string_view response_body, std::string_view continuation) {
  json resp = parse_body(std::string(response_body), "completions");
  if (!resp.contains("choices") || !resp["choices"].is_array() || resp["choices"].empty()) {
    throw ProtocolError("completions response has no choices");
  }
  const json& choice = resp["choices"][0];
  if (!choice.contains("logprobs") || !choice["logprobs"].is_object()) {
    throw LogprobUnsupported("backend returned no logprobs for an echo request");
  }
  const json& lp = choice["logprobs"];
  if (!lp.contains("tokens") || !lp.contains("token_logprobs") || !lp["tokens"].is_array() ||
      !lp["token_logprobs"].is_array() || lp["tokens"].size() != lp["token_logprobs"].size()) {
    throw LogprobUnsupported("backend logprobs lack aligned tokens/token_logprobs arrays");
  }
  const json& tokens = lp["tokens"];
  const json& values = lp["token_logprobs"];

  // Walk back from the end until the suffix equals the continuation.
  std::size_t first = tokens.size();
  std::size_t covered = 0;
  while (covered < continuation.size()) {
    if (first == 0) throw TokenAlignmentError("echoed tokens are shorter than the continuation");
    --first;
    if (!tokens[first].is_string()) throw ProtocolError("token is not a string");
    covered += tokens[first].get_ref<const std::string&>().size();
  }

  LogprobResult out;
  out.continuation = std::string(continuation);
  std::string joined;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    const auto& tok = tokens[i].get_ref<const std::string&>();
    joined += tok;
    if (!values[i].is_number()) {
      throw TokenAlignmentError("continuation token '" + tok + "' has no logprob");
    }
    double v = values[i].get<double>();
    if (v > 0.0) throw ProtocolError("positive logprob for token '" + tok + "'");
    out.tokens.push_back({tok, v});
    out.total_logprob += v;
  }
  if (covered != continuation.size() || joined != continuation) {
    throw TokenAlignmentError("continuation '" + std::string(continuation) +
                              "' does not fall on a token boundary (suffix tokens spell '" + joined + "')");
  }
  return out;
}

LogprobResult Gateway::score_continuation(const ModelEndpoint& endpoint, std::string_view prompt_text,
                                          std::string_view continuation) {
  if (continuation.empty()) throw std::invalid_argument("continuation must be non-empty");
  ++score_calls_;
  json body = {{"model", endpoint.model_id},
               {"prompt", std::string(prompt_text) + std::string(continuation)},
               {"max_tokens", 0},
               {"echo", true},
               {"logprobs", 1},
               {"temperature", 0.0}};
  std::string payload = body.dump();
  std::string fp = fingerprint(endpoint, kCompletionsPath, payload);
  bool from_cache = false;
  std::string response;
  try {
    response = post(endpoint, kCompletionsPath, payload, fp, from_cache);
  } catch (const HttpError& e) {
    if ((e.status() == 400 || e.status() == 404 || e.status() == 422) &&
        (e.body().find("echo") != std::string::npos || e.body().find("logprobs") != std::string::npos)) {
      throw LogprobUnsupported(endpoint.model_id + " cannot echo prompt logprobs: " + e.body());
    }
    throw;
  }
  LogprobResult result = extract_continuation_logprobs(response, continuation);
  if (!from_cache) record_success(fp, response);
  return result;
}

EmbeddingResult Gateway::embed(const ModelEndpoint& endpoint, std::string_view input) {
  if (input.empty()) throw std::invalid_argument("embedding input must be non-empty");
  ++embed_calls_;
  json body = {{"model", endpoint.model_id}, {"input", std::string(input)}};
  std::string payload = body.dump();
  std::string fp = fingerprint(endpoint, kEmbeddingsPath, payload);
  bool from_cache = false;
  std::string response = post(endpoint, kEmbeddingsPath, payload, fp, from_cache);
  EmbeddingResult result{parse_embedding(response), endpoint.model_id};
  {
    std::lock_guard lock(mu_);
    auto [it, inserted] = embedding_dims_.emplace(endpoint.model_id, result.vector.size());
    if (!inserted && it->second != result.vector.size()) {
      throw DimensionMismatch("embedding model " + endpoint.model_id + " returned dimension " +
                              std::to_string(result.vector.size()) + ", expected " + std::to_string(it->second));
    }
  }
  if (!from_cache) record_success(fp, response);
  return result;
}

GatewayStats Gateway::stats() const {
  return {generate_calls_.load(), score_calls_.load(), embed_calls_.load(), network_requests_.load(),
          cache_hits_.load()};
}

}  // namespace suffbench::gateway
