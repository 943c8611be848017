#include "suffbench/gateway/rate_limiter.hpp"

#include <algorithm>
#include <stdexcept>

namespace suffbench::gateway {

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock) : clock_(std::move(clock)) {
  if (requests_per_minute < 1) throw std::invalid_argument("requests_per_minute must be >= 1");
  constexpr Clock::duration::rep kMinute = 60'000'000'000;
  interval_ = Clock::duration((kMinute + requests_per_minute - 1) / requests_per_minute);
}

Clock::duration RateLimiter::acquire() {
  Clock::duration slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(next_free_, clock_->now());
    next_free_ = slot + interval_;
  }
  clock_->sleep_until(slot);
  return slot;
}

}  // namespace suffbench::gateway
