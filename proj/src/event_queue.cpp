#include "olapsim/event_queue.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "olapsim/errors.hpp"

namespace olapsim {

namespace {

// std heap algorithms build a max-heap, so "greater" yields the earliest event on top.
struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::SessionStart: return "SessionStart";
        case EventKind::SessionRepetition: return "SessionRepetition";
        case EventKind::PageRefresh: return "PageRefresh";
        case EventKind::ObjectRefresh: return "ObjectRefresh";
        case EventKind::QueryDispatch: return "QueryDispatch";
        case EventKind::QueryArrival: return "QueryArrival";
        case EventKind::ServiceStart: return "ServiceStart";
        case EventKind::ServiceComplete: return "ServiceComplete";
        case EventKind::MetricTick: return "MetricTick";
        case EventKind::SimEnd: return "SimEnd";
    }
    return "Unknown";
}

std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::Drained: return "drained";
        case StopReason::MaxEvents: return "max_events";
        case StopReason::EndTime: return "end_time";
    }
    return "unknown";
}

void EventQueue::schedule(Seconds time, EventKind kind, std::uint32_t id) {
    if (!std::isfinite(time) || time < now_) {
        std::ostringstream msg;
        msg << "scheduling " << to_string(kind) << " at t=" << time
            << " which precedes the clock t=" << now_;
        throw InvariantViolation(msg.str());
    }
    heap_.push_back(Event{time, next_seq_++, kind, id});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
}

Event EventQueue::pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    const Event ev = heap_.back();
    heap_.pop_back();
    now_ = ev.time;
    return ev;
}

}  // namespace olapsim
