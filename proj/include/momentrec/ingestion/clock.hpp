#pragma once

#include <chrono>
#include <mutex>
#include <vector>

namespace momentrec::ingestion {

// Monotonic time source that can be faked in tests.
class Clock {
 public:
  using Duration = std::chrono::nanoseconds;

  virtual ~Clock() = default;
  virtual Duration now() const = 0;
  virtual void sleep_for(Duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  Duration now() const override;
  void sleep_for(Duration d) override;
};

// Time only moves when someone sleeps. Records every sleep.
class ManualClock final : public Clock {
 public:
  Duration now() const override;
  void sleep_for(Duration d) override;
  void advance(Duration d);
  std::vector<Duration> sleeps() const;

 private:
  mutable std::mutex mutex_;
  Duration now_{0};
  std::vector<Duration> sleeps_;
};

}  // namespace momentrec::ingestion
