#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "suffbench/gateway/clock.hpp"
#include "suffbench/gateway/rate_limiter.hpp"
#include "suffbench/gateway/response_cache.hpp"
#include "suffbench/gateway/retry.hpp"
#include "suffbench/gateway/transport.hpp"
#include "suffbench/prompts.hpp"

namespace suffbench::gateway {

/// An OpenAI-compatible model binding. `api_key_ref` names the environment
/// variable holding the key; empty means no Authorization header.
struct ModelEndpoint {
  std::string base_url;
  std::string model_id;
  std::string api_key_ref;
  int max_retries = 3;
  int requests_per_minute = 60;
  std::chrono::milliseconds timeout{60000};

  /// Throws ConfigError unless requests_per_minute >= 1 and max_retries >= 0.
  void validate() const;
  std::string key() const { return base_url + "|" + model_id; }
};

struct GenerationParams {
  double temperature = 0.0;
  int max_tokens = 512;
};

enum class FinishReason { stop, length, other };

struct GenerationResult {
  std::string text;
  FinishReason finish_reason = FinishReason::other;
  std::string request_fingerprint;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
};

struct LogprobResult {
  std::string continuation;
  std::vector<TokenLogprob> tokens;
  double total_logprob = 0.0;
};

struct EmbeddingResult {
  std::vector<double> vector;
  std::string model_id;
};

/// Per-gateway counters. `*_calls` count API calls made on the gateway
/// (cache hits included); `network_requests` counts transport attempts.
struct GatewayStats {
  std::size_t generate_calls = 0;
  std::size_t score_calls = 0;
  std::size_t embed_calls = 0;
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
};

struct GatewayOptions {
  std::optional<std::filesystem::path> cache_dir;
  bool force_refresh = false;  // skip cache reads; writes still happen
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{30000};
  std::shared_ptr<Clock> clock;  // defaults to SteadyClock
  // Builds the transport for an endpoint; defaults to mock:// or HTTP by URL.
  std::function<std::unique_ptr<Transport>(const ModelEndpoint&)> transport_factory;
};

/// Extracts the continuation's token span from an echoed completions
/// response. Walks tokens backward from the end until their concatenation
/// equals `continuation`; overshooting the boundary is a TokenAlignmentError.
LogprobResult extract_continuation_logprobs(std::string_view response_body, std::string_view continuation);

/// Uniform client for generation, teacher-forced scoring and embeddings.
/// Thread-safe.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  GenerationResult generate(const ModelEndpoint& endpoint, const RenderedPrompt& prompt,
                            const GenerationParams& params = {});

  /// Teacher-forced logprobs of `continuation` after `prompt_text` via the
  /// completions route with echo=true, logprobs=1, max_tokens=0.
  LogprobResult score_continuation(const ModelEndpoint& endpoint, std::string_view prompt_text,
                                   std::string_view continuation);

  EmbeddingResult embed(const ModelEndpoint& endpoint, std::string_view text);

  GatewayStats stats() const;

  /// SHA-256 of the canonical request (URL + sorted-key JSON body).
  static std::string fingerprint(const ModelEndpoint& endpoint, std::string_view path, const std::string& canonical_body);

 private:
  struct EndpointState;

  EndpointState& state_for(const ModelEndpoint& endpoint);
  std::string post(const ModelEndpoint& endpoint, std::string_view path, const std::string& body,
                   const std::string& cache_key, bool& from_cache);
  void record_success(const std::string& cache_key, const std::string& payload);

  GatewayOptions options_;
  std::unique_ptr<ResponseCache> cache_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<EndpointState>> endpoints_;
  std::map<std::string, std::size_t> embedding_dims_;

  std::atomic<std::size_t> generate_calls_{0};
  std::atomic<std::size_t> score_calls_{0};
  std::atomic<std::size_t> embed_calls_{0};
  std::atomic<std::size_t> network_requests_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace suffbench::gateway
