#pragma once

#include <chrono>
#include <functional>

#include "suffbench/error.hpp"
#include "suffbench/gateway/clock.hpp"

namespace suffbench::gateway {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{30000};

  /// Delay before retry number `retry` (1-based).
  std::chrono::milliseconds delay_for(int retry) const;
};

/// Runs `attempt` until it succeeds, a non-retryable error occurs, or
/// max_retries retries are spent. HTTP 429/5xx and TransportError are
/// retryable; the last error is rethrown.
template <typename F>
auto with_retries(const RetryPolicy& policy, Clock& clock, F&& attempt) -> decltype(attempt()) {
  for (int retry = 0;; ++retry) {
    try {
      return attempt();
    } catch (const HttpError& e) {
      if (!e.retryable() || retry >= policy.max_retries) throw;
    } catch (const TransportError&) {
      if (retry >= policy.max_retries) throw;
    }
    clock.sleep_for(policy.delay_for(retry + 1));
  }
}

}  // namespace suffbench::gateway
