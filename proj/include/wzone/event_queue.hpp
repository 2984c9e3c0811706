#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace wzone {

/// Simulation time in integer microseconds.
using SimTime = std::int64_t;

inline SimTime seconds_to_sim(double s) { return static_cast<SimTime>(std::llround(s * 1e6)); }
inline double sim_to_seconds(SimTime t) { return static_cast<double>(t) * 1e-6; }

/// Time-ordered event queue. Events at equal timestamps fire in scheduling
/// order, so a run is fully determined by the order of schedule() calls.
class EventQueue {
 public:
  using Handler = std::function<void(SimTime)>;

  void schedule(SimTime at, Handler handler) {
    if (at < now_) throw std::logic_error("cannot schedule an event in the past");
    heap_.push({at, next_seq_++, std::move(handler)});
  }

  void schedule_in(SimTime delay, Handler handler) { schedule(now_ + delay, std::move(handler)); }

  /// Fires the earliest event; false when the queue is empty.
  bool step() {
    if (heap_.empty()) return false;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.at;
    e.handler(now_);
    return true;
  }

  void run() {
    while (step()) {
    }
  }

  void run_until(SimTime end) {
    while (!heap_.empty() && heap_.top().at <= end) step();
    if (now_ < end) now_ = end;
  }

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] std::size_t pending() const { return heap_.size(); }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Handler handler;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace wzone
