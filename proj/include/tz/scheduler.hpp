#pragma once

#include <functional>

#include "tz/types.hpp"

namespace tz {

/// Time source and timer facility the protocol entities run on. The
/// simulation kernel is the only production implementation.
class Scheduler {
 public:
  using Callback = std::function<void()>;

  virtual ~Scheduler() = default;

  virtual SimTime now() const = 0;

  // Callbacks scheduled for the same instant run in scheduling order.
  virtual void schedule(SimTime at, Callback cb) = 0;
};

}  // namespace tz
