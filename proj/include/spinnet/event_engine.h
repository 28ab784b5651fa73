#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace spinnet::network {

enum class EventKind { AttemptStart, HeraldArrived, SwapReady, DistillReady, ProtocolDone };

struct SimEvent {
  double time_ns;
  std::uint64_t seq;  // insertion order, breaks time ties
  EventKind kind;
  std::function<void()> action;
};

// Single-threaded discrete-event loop. Events pop in (time, seq) order; an
// event may not be scheduled before the current time.
class EventEngine {
 public:
  double now() const { return now_; }

  void schedule(double time_ns, EventKind kind, std::function<void()> action);
  void schedule_in(double delay_ns, EventKind kind, std::function<void()> action) {
    schedule(now_ + delay_ns, kind, std::move(action));
  }

  // Drains the queue.
  void run();
  bool empty() const { return queue_.empty(); }
  std::uint64_t processed() const { return processed_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.time_ns != b.time_ns ? a.time_ns > b.time_ns : a.seq > b.seq;
    }
  };

  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
};

}  // namespace spinnet::network
