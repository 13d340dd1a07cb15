#pragma once

#include "pm/event.hpp"

#include <Eigen/Dense>

#include <vector>

namespace pm {

/// dR/dt: zero while R is pinned at 0 (R = 0 and A <= B P), else A - B P.
double uncertainty_rate(double value, double detection, double growth, double decay);

bool is_pinned(double value, double detection, double growth, double decay);

struct UncertaintyState {
    Eigen::VectorXd values;
    std::vector<bool> at_zero;

    static UncertaintyState from_values(Eigen::VectorXd values);
};

struct UncertaintyStep {
    UncertaintyState state;
    /// xi^0 / xi^+ events for this step, in index order.
    std::vector<Event> events;
};

/// Explicit Euler step from time `t`. Values that would go negative are
/// clamped to 0 and emit xi^0 at the interpolated crossing time; values
/// leaving 0 emit xi^+ at `t`.
UncertaintyStep step_uncertainty(const UncertaintyState& state, const Eigen::VectorXd& rates, double t, double dt,
                                 long step_index = 0);

}  // namespace pm
