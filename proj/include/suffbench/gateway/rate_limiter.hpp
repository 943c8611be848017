#pragma once

#include <memory>
#include <mutex>

#include "suffbench/gateway/clock.hpp"

namespace suffbench::gateway {

/// Token bucket with a burst of one token, refilled every 60s / rpm
/// (rounded up to the next nanosecond). Admissions are spaced at least one
/// refill interval apart, so any half-open 60-second window admits at most
/// `requests_per_minute` requests.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);

  /// Blocks until a token is available, then consumes it. Returns the admission time.
  Clock::duration acquire();

  Clock::duration interval() const { return interval_; }

 private:
  std::shared_ptr<Clock> clock_;
  Clock::duration interval_;
  std::mutex mu_;
  Clock::duration next_free_{Clock::duration::min()};
};

}  // namespace suffbench::gateway
