#include "tz/sim/kernel.hpp"

#include <stdexcept>
#include <string>

namespace tz::sim {

void Kernel::push(SimTime at, int phase, Callback cb) {
  if (at < now_) {
    throw std::logic_error("event scheduled in the past: " + std::to_string(at) + " < " +
                           std::to_string(now_));
  }
  queue_.push(Item{at, phase, next_seq_++, std::move(cb)});
}

void Kernel::schedule(SimTime at, Callback cb) { push(at, 1, std::move(cb)); }

void Kernel::schedule_input(SimTime at, Callback cb) { push(at, 0, std::move(cb)); }

void Kernel::run_until(SimTime until, const std::function<void()>& after_step) {
  while (!queue_.empty() && queue_.top().at <= until) {
    // priority_queue::top is const; the callback is moved out before pop.
    Item item = std::move(const_cast<Item&>(queue_.top()));
    queue_.pop();
    now_ = item.at;
    ++steps_;
    item.cb();
    if (after_step) after_step();
  }
  if (until > now_) now_ = until;
}

}  // namespace tz::sim
