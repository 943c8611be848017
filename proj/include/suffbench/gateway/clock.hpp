#pragma once

#include <atomic>
#include <chrono>
#include <thread>

namespace suffbench::gateway {

/// Time source for rate limiting and backoff; tests swap in VirtualClock.
class Clock {
 public:
  using duration = std::chrono::nanoseconds;

  virtual ~Clock() = default;
  virtual duration now() = 0;
  virtual void sleep_until(duration t) = 0;

  void sleep_for(duration d) { sleep_until(now() + d); }
};

class SteadyClock final : public Clock {
 public:
  duration now() override {
    return std::chrono::duration_cast<duration>(std::chrono::steady_clock::now().time_since_epoch());
  }
  void sleep_until(duration t) override {
    auto d = t - now();
    if (d > duration::zero()) std::this_thread::sleep_for(d);
  }
};

/// Sleeping advances time instantly.
class VirtualClock final : public Clock {
 public:
  duration now() override { return duration(now_.load()); }
  void sleep_until(duration t) override {
    auto target = t.count();
    auto cur = now_.load();
    while (cur < target && !now_.compare_exchange_weak(cur, target)) {
    }
  }
  void advance(duration d) { now_ += d.count(); }

 private:
  std::atomic<duration::rep> now_{0};
};

}  // namespace suffbench::gateway
