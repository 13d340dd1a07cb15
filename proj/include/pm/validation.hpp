#pragma once

#include "pm/simulator.hpp"

#include <string>
#include <vector>

namespace pm {

enum class FdMode {
    /// Re-run the whole recursion for every probe.
    Full,
    /// Replay the base run's anomaly schedule for every probe.
    FrozenSchedule,
};

std::string_view to_string(FdMode mode);
FdMode fd_mode_from_string(std::string_view name);

/// The finite-difference mode whose derivative `mode` is meant to reproduce.
FdMode matched_fd_mode(GradMode mode);

struct FdGradient {
    Eigen::VectorXd gradient;
    /// True where the +h and -h probes produced different event sequences.
    std::vector<bool> event_mismatch;
};

/// Central differences (J(theta + h e_k) - J(theta - h e_k)) / 2h.
FdGradient fd_gradient_detailed(const Scenario& scenario, std::span<const TrajectoryParams> params, double h,
                                FdMode mode, SensingModel sensing = SensingModel::VelocityDependent);

Eigen::VectorXd fd_gradient(const Scenario& scenario, std::span<const TrajectoryParams> params, double h, FdMode mode,
                            SensingModel sensing = SensingModel::VelocityDependent);

struct GradComponent {
    std::string name;  // e.g. "agent0.X"
    double analytic = 0.0;
    double numeric = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    /// |numeric| above the activity floor.
    bool active = false;
    /// Dropped because the probes straddle an event.
    bool excluded = false;
};

struct GradCheckReport {
    GradMode grad_mode = GradMode::Paper;
    FdMode fd_mode = FdMode::FrozenSchedule;
    double h = 0.0;
    double tolerance = 0.0;
    double activity_floor = 0.0;
    std::vector<GradComponent> components;
    double max_rel_error = 0.0;
    int excluded = 0;
    bool pass = false;

    std::string to_json() const;
};

struct CheckOptions {
    double h = 1e-5;
    double activity_floor = 1e-12;
    SensingModel sensing = SensingModel::VelocityDependent;
    /// Defaults to matched_fd_mode(grad_mode).
    std::optional<FdMode> fd_mode;
};

/// pass <=> max rel error <= tolerance over active, non-excluded components.
GradCheckReport check(const Scenario& scenario, std::span<const TrajectoryParams> params, GradMode grad_mode,
                      double tolerance, const CheckOptions& options = {});

}  // namespace pm
