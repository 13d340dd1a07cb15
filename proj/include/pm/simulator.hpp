#pragma once

#include "pm/event.hpp"
#include "pm/ipa.hpp"
#include "pm/kinematics.hpp"
#include "pm/scenario.hpp"
#include "pm/sensing.hpp"

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace pm {

/// How the anomaly schedule enters the gradient.
enum class GradMode {
    None,
    /// Anomaly and anomaly rate treated as parameter independent.
    Paper,
    /// Adds the forward sensitivity of the anomaly schedule.
    Total,
};

std::string_view to_string(GradMode mode);
GradMode grad_mode_from_string(std::string_view name);

/// Realized anomaly and anomaly rate per grid step (rows) and agent (columns),
/// plus the max-speed events produced while generating it.
struct AnomalySchedule {
    Eigen::MatrixXd anomaly;
    Eigen::MatrixXd anomaly_rate;
    std::vector<Event> events;
};

struct SimOptions {
    GradMode grad_mode = GradMode::Paper;
    SensingModel sensing = SensingModel::VelocityDependent;
    /// Record every n-th grid sample; 0 disables traces.
    long trace_stride = 1;
    bool record_schedule = false;
    /// Keep the dR row before and after every xi event.
    bool record_event_gradients = false;
    /// Replay this schedule instead of integrating the anomaly dynamics.
    const AnomalySchedule* frozen_schedule = nullptr;
};

struct TraceSample {
    double t = 0.0;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    Eigen::VectorXd uncertainty;
    Eigen::VectorXd detection;
};

struct Diagnostics {
    double min_pair_distance = std::numeric_limits<double>::infinity();
    double min_obstacle_distance = std::numeric_limits<double>::infinity();
    /// Cruising samples whose curvature implies ||s''|| > u_max.
    long cruise_accel_violations = 0;
    /// Accelerating steps that fell back to the vertex root.
    long feasibility_warnings = 0;
    long coincident_points = 0;
    double max_speed = 0.0;
    /// False when no target was ever sensed (gradient identically zero).
    bool gradient_excited = false;
};

struct EventGradientRecord {
    std::size_t event = 0;  // index into SimResult::events
    Eigen::RowVectorXd before;
    Eigen::RowVectorXd after;
};

struct SimResult {
    double J = 0.0;
    double J1 = 0.0;
    double J2 = 0.0;
    double J3 = 0.0;
    double agent_penalty = 0.0;
    double obstacle_penalty = 0.0;
    GradMode grad_mode = GradMode::None;
    Eigen::VectorXd grad;
    std::vector<TraceSample> traces;
    std::vector<Event> events;
    Diagnostics diagnostics;
    AnomalySchedule schedule;
    std::vector<EventGradientRecord> event_gradients;
};

/// Column offsets of each agent's block in the stacked parameter vector.
std::vector<Eigen::Index> parameter_offsets(std::span<const TrajectoryParams> params);
Eigen::VectorXd stack_parameters(std::span<const TrajectoryParams> params);
std::vector<TrajectoryParams> unstack_parameters(std::span<const TrajectoryParams> shape,
                                                 const Eigen::Ref<const Eigen::VectorXd>& theta);

/// One forward pass over [0, T) on the scenario grid. Integrals use the left
/// rectangle rule and are divided by T.
SimResult simulate(const Scenario& scenario, std::span<const TrajectoryParams> params, const SimOptions& options = {});

/// Trace CSV: t, then s{n}x,s{n}y,v{n}x,v{n}y per agent, then R{i} per target.
void write_trace_csv(std::ostream& out, const SimResult& result, std::size_t agents, std::size_t targets);

/// One JSON object per line: {"kind":...,"time":...,"indices":[...]}.
void write_event_log(std::ostream& out, const std::vector<Event>& events);

/// Writes trace.csv and events.jsonl into `directory` (created if needed).
void export_traces(const SimResult& result, const Scenario& scenario, const std::filesystem::path& directory);

}  // namespace pm
