#include "pm/uncertainty.hpp"

namespace pm {

double uncertainty_rate(double value, double detection, double growth, double decay) {
    if (is_pinned(value, detection, growth, decay)) return 0.0;
    return growth - decay * detection;
}

bool is_pinned(double value, double detection, double growth, double decay) {
    return value == 0.0 && growth <= decay * detection;
}

UncertaintyState UncertaintyState::from_values(Eigen::VectorXd values) {
    UncertaintyState state;
    state.at_zero.resize(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) state.at_zero[i] = values(i) == 0.0;
    state.values = std::move(values);
    return state;
}

UncertaintyStep step_uncertainty(const UncertaintyState& state, const Eigen::VectorXd& rates, double t, double dt,
                                 long step_index) {
    const Eigen::Index m = state.values.size();
    UncertaintyStep out;
    out.state.values.resize(m);
    out.state.at_zero.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double value = state.values(i);
        const double rate = rates(i);
        const double next = value + rate * dt;
        const int index = static_cast<int>(i);
        if (value == 0.0 && rate > 0.0) {
            out.events.push_back({EventKind::UncertaintyLeavesZero, t, {index, -1}, step_index});
        }
        if (next <= 0.0) {
            out.state.values(i) = 0.0;
            if (value > 0.0) {
                out.events.push_back({EventKind::UncertaintyHitsZero, t + value / -rate, {index, -1}, step_index});
            }
        } else {
            out.state.values(i) = next;
        }
        out.state.at_zero[i] = out.state.values(i) == 0.0;
    }
    return out;
}

}  // namespace pm
