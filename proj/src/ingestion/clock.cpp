#include "momentrec/ingestion/clock.hpp"

#include <thread>

namespace momentrec::ingestion {

Clock::Duration SystemClock::now() const {
  return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(Duration d) {
  if (d > Duration::zero()) std::this_thread::sleep_for(d);
}

Clock::Duration ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::sleep_for(Duration d) {
  std::lock_guard lock(mutex_);
  sleeps_.push_back(d);
  if (d > Duration::zero()) now_ += d;
}

void ManualClock::advance(Duration d) {
  std::lock_guard lock(mutex_);
  now_ += d;
}

std::vector<Clock::Duration> ManualClock::sleeps() const {
  std::lock_guard lock(mutex_);
  return sleeps_;
}

}  // namespace momentrec::ingestion
