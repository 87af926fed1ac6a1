#pragma once

// Deterministic discrete-event kernel. Events are ordered by (time, phase,
// insertion order); scripted scenario inputs use phase 0 so that they take
// effect before internal events due at the same instant.

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "tz/scheduler.hpp"

namespace tz::sim {

class Kernel final : public Scheduler {
 public:
  SimTime now() const override { return now_; }

  // Internal events (phase 1). Scheduling in the past is a logic error.
  void schedule(SimTime at, Callback cb) override;

  // Scenario inputs (phase 0).
  void schedule_input(SimTime at, Callback cb);

  /// Runs every event due at or before `until`, calling `after_step` after
  /// each one. The clock ends at `until`.
  void run_until(SimTime until, const std::function<void()>& after_step = {});

  std::size_t pending() const noexcept { return queue_.size(); }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  struct Item {
    SimTime at;
    int phase;
    std::uint64_t seq;
    Callback cb;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const noexcept {
      if (a.at != b.at) return a.at > b.at;
      if (a.phase != b.phase) return a.phase > b.phase;
      return a.seq > b.seq;
    }
  };

  void push(SimTime at, int phase, Callback cb);

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t steps_ = 0;
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
};

}  // namespace tz::sim
