#include "suffbench/gateway/retry.hpp"

#include <algorithm>
#include <cmath>

namespace suffbench::gateway {

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
  double ms = static_cast<double>(initial_delay.count()) * std::pow(backoff_factor, retry - 1);
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::chrono::milliseconds::rep>(ms));
}

}  // namespace suffbench::gateway
