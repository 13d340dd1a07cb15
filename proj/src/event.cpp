#include "pm/event.hpp"

#include "pm/types.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace pm {

int Event::arity() const {
    switch (kind) {
    case EventKind::PairClearanceRestored:
    case EventKind::PairClearanceLost:
    case EventKind::ObstacleClearanceRestored:
    case EventKind::ObstacleClearanceLost:
        return 2;
    default:
        return 1;
    }
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::UncertaintyHitsZero: return "xi0";
    case EventKind::UncertaintyLeavesZero: return "xi+";
    case EventKind::MaxSpeedReached: return "u0";
    case EventKind::PairClearanceRestored: return "zeta0";
    case EventKind::PairClearanceLost: return "zeta-";
    case EventKind::ObstacleClearanceRestored: return "delta0";
    case EventKind::ObstacleClearanceLost: return "delta-";
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view name) {
    for (auto k : {EventKind::UncertaintyHitsZero, EventKind::UncertaintyLeavesZero, EventKind::MaxSpeedReached,
                   EventKind::PairClearanceRestored, EventKind::PairClearanceLost,
                   EventKind::ObstacleClearanceRestored, EventKind::ObstacleClearanceLost}) {
        if (to_string(k) == name) return k;
    }
    throw ParseError("unknown event kind '" + std::string(name) + "'");
}

bool event_before(const Event& lhs, const Event& rhs) {
    return std::tuple(lhs.time, static_cast<int>(lhs.kind), lhs.indices[0], lhs.indices[1]) <
           std::tuple(rhs.time, static_cast<int>(rhs.kind), rhs.indices[0], rhs.indices[1]);
}

void sort_events(std::vector<Event>& events) { std::stable_sort(events.begin(), events.end(), event_before); }

}  // namespace pm
