#pragma once

#include "pm/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pm {

struct FixedStep {
    double alpha = 1e-4;
};

/// Backtracks by `shrink` until J drops by c * alpha * ||grad||^2. The first
/// trial is min(initial, max_step / ||grad||); max_step <= 0 disables the cap.
struct ArmijoStep {
    double initial = 0.05;
    double max_step = 0.0;
    double shrink = 0.5;
    double c = 1e-4;
    int max_backtracks = 40;
};

using StepRule = std::variant<FixedStep, ArmijoStep>;

struct OptOptions {
    double epsilon = 0.01;
    int max_iters = 500;
    StepRule step_rule = ArmijoStep{};
    int starts = 1;
    std::uint64_t seed = 0;
    GradMode grad_mode = GradMode::Paper;
    SensingModel sensing = SensingModel::VelocityDependent;
};

void validate(const OptOptions& options);

/// One row of the convergence log. h = 0 is the initial point.
struct Iterate {
    int start = 0;
    int h = 0;
    double J = 0.0;
    double J1 = 0.0;
    double J2 = 0.0;
    double J3 = 0.0;
    double alpha = 0.0;
    double grad_norm = 0.0;
};

enum class Termination { Converged, MaxIterations, ZeroGradient, LineSearchExhausted, Failed };

std::string_view to_string(Termination reason);

struct StartOutcome {
    int index = 0;
    Termination termination = Termination::Failed;
    std::string error;
    std::vector<TrajectoryParams> initial;
    std::vector<TrajectoryParams> params;
    /// Best iterate of this start (see optimize for the ranking).
    double J = 0.0;
    bool collision_free = false;
    int iterations = 0;
};

struct OptResult {
    std::vector<TrajectoryParams> best_params;
    double best_J = 0.0;
    int start_index = -1;
    std::vector<Iterate> iterates;
    std::vector<StartOutcome> starts;
    SimResult final_run;
};

class AllStartsFailedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Projected gradient descent from every initialization. The result is the
/// lowest-J iterate among those with J2 = J3 = 0, or the lowest-J iterate
/// overall when none is collision free; ties go to the lower start index.
OptResult optimize(const Scenario& scenario, const std::vector<std::vector<TrajectoryParams>>& initializations,
                   const OptOptions& options);

/// `count` draws of one parameter set per agent, reproducible from `seed`.
/// Fourier draws use `fourier_order` harmonics in each coordinate.
std::vector<std::vector<TrajectoryParams>> random_initializations(const Scenario& scenario, Family family, int count,
                                                                  std::uint64_t seed, int fourier_order = 2);

void write_convergence_csv(std::ostream& out, const std::vector<Iterate>& iterates);

}  // namespace pm
