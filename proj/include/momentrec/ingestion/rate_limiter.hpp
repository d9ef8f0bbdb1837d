#pragma once

#include <mutex>

#include "momentrec/ingestion/clock.hpp"

namespace momentrec::ingestion {

// Token bucket with capacity 1: consecutive acquisitions are spaced at least
// 1/rate seconds apart, so no window of one second ever sees more than
// `rate` requests.
class RateLimiter {
 public:
  RateLimiter(double rate_per_sec, Clock& clock);

  // Blocks (via the clock) until a request may be sent.
  void acquire();

  double rate() const { return rate_; }

 private:
  double rate_;
  Clock& clock_;
  std::mutex mutex_;
  bool first_ = true;
  Clock::Duration next_allowed_{0};
};

}  // namespace momentrec::ingestion
