#include "spinnet/event_engine.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinnet::network {

void EventEngine::schedule(double time_ns, EventKind kind, std::function<void()> action) {
  if (!(time_ns >= now_) || std::isnan(time_ns)) {
    throw std::logic_error("event scheduled in the past: " + std::to_string(time_ns) + " < " +
                           std::to_string(now_));
  }
  queue_.push(SimEvent{time_ns, next_seq_++, kind, std::move(action)});
}

void EventEngine::run() {
  while (!queue_.empty()) {
    SimEvent ev = queue_.top();
    queue_.pop();
    now_ = ev.time_ns;
    ++processed_;
    if (ev.action) ev.action();
  }
}

}  // namespace spinnet::network
