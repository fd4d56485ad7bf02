#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace olapsim {

using Seconds = double;

enum class EventKind : std::uint8_t {
    SessionStart,
    SessionRepetition,
    PageRefresh,
    ObjectRefresh,
    QueryDispatch,
    QueryArrival,
    ServiceStart,
    ServiceComplete,
    MetricTick,
    SimEnd,
};

inline constexpr std::size_t kEventKindCount = 10;

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;

/// A timestamped occurrence. `id` is kind-specific: a session id for the
/// session events, a query slot for QueryDispatch/QueryArrival, a server
/// index for ServiceStart/ServiceComplete, unused otherwise.
struct Event {
    Seconds time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::SimEnd;
    std::uint32_t id = 0;
};

struct RunLimits {
    std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
    /// Events at exactly end_time are processed; later ones are not.
    Seconds end_time = std::numeric_limits<Seconds>::infinity();
};

enum class StopReason : std::uint8_t { Drained, MaxEvents, EndTime };

[[nodiscard]] std::string_view to_string(StopReason reason) noexcept;

struct RunSummary {
    std::uint64_t events = 0;
    std::array<std::uint64_t, kEventKindCount> per_kind{};
    Seconds final_time = 0.0;
    StopReason reason = StopReason::Drained;

    [[nodiscard]] std::uint64_t count(EventKind kind) const noexcept {
        return per_kind[static_cast<std::size_t>(kind)];
    }
};

/// Binary min-heap of events ordered by (time, seq) plus the virtual clock.
class EventQueue {
public:
    /// Throws InvariantViolation if `time` precedes the clock or is not finite.
    void schedule(Seconds time, EventKind kind, std::uint32_t id = 0);

    [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }
    [[nodiscard]] const Event& top() const noexcept { return heap_.front(); }

    /// Removes the earliest event and advances the clock to its time.
    Event pop();

    /// Time of the most recently dequeued event, 0 before the first.
    [[nodiscard]] Seconds now() const noexcept { return now_; }

private:
    std::vector<Event> heap_;
    Seconds now_ = 0.0;
    std::uint64_t next_seq_ = 0;
};

/// Drains `queue` into `handler(const Event&, EventQueue&)` until the queue is
/// empty, `limits.max_events` events have been processed, or the next event
/// lies beyond `limits.end_time`.
template <typename Handler>
RunSummary run(EventQueue& queue, const RunLimits& limits, Handler&& handler) {
    RunSummary summary;
    for (;;) {
        if (queue.empty()) {
            summary.reason = StopReason::Drained;
            break;
        }
        if (summary.events >= limits.max_events) {
            summary.reason = StopReason::MaxEvents;
            break;
        }
        if (queue.top().time > limits.end_time) {
            summary.reason = StopReason::EndTime;
            break;
        }
        const Event ev = queue.pop();
        ++summary.events;
        ++summary.per_kind[static_cast<std::size_t>(ev.kind)];
        handler(ev, queue);
    }
    summary.final_time = queue.now();
    return summary;
}

}  // namespace olapsim
