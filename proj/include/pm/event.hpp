#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace pm {

/// Event kinds, declared in the canonical ordering used to break ties
/// between events with identical time stamps.
enum class EventKind {
    UncertaintyHitsZero,    // xi^0  : R_i reaches 0
    UncertaintyLeavesZero,  // xi^+  : R_i leaves 0
    MaxSpeedReached,        // u^0   : acceleration control switches off
    PairClearanceRestored,  // zeta^0: pair deficit returns to 0
    PairClearanceLost,      // zeta^-: pair deficit becomes negative
    ObstacleClearanceRestored,  // delta^0
    ObstacleClearanceLost,      // delta^-
};

/// Zero-based indices: {target}, {agent}, {p, q} with p < q, or {obstacle, agent}.
struct Event {
    EventKind kind;
    double time = 0.0;
    std::array<int, 2> indices{-1, -1};
    /// Grid step during which the event was detected.
    long step = 0;

    int arity() const;
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

/// Strict weak order: time, then kind, then indices.
bool event_before(const Event& lhs, const Event& rhs);

void sort_events(std::vector<Event>& events);

}  // namespace pm
