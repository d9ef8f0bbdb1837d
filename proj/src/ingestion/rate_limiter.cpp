#include "momentrec/ingestion/rate_limiter.hpp"

#include <cmath>

#include "momentrec/core/error.hpp"

namespace momentrec::ingestion {

RateLimiter::RateLimiter(double rate_per_sec, Clock& clock) : rate_(rate_per_sec), clock_(clock) {
  if (!(rate_per_sec > 0.0) || !std::isfinite(rate_per_sec)) {
    throw ValidationError("rate limit must be a positive number of requests per second");
  }
}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  const auto interval = Clock::Duration{static_cast<Clock::Duration::rep>(std::ceil(1e9 / rate_))};
  auto now = clock_.now();
  if (!first_ && now < next_allowed_) {
    clock_.sleep_for(next_allowed_ - now);
    now = clock_.now();
  }
  first_ = false;
  next_allowed_ = now + interval;
}

}  // namespace momentrec::ingestion
