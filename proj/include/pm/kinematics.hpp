#pragma once

#include "pm/scenario.hpp"
#include "pm/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pm {

/// Minor-axis floor for elliptical trajectories.
inline constexpr double kMinMinorAxis = 1e-3;
/// Smallest admissible ||ds/dpsi||^2 before the curve is treated as stationary.
inline constexpr double kSpeedCoefficientFloor = 1e-12;
/// Lower bound kept on the optimized Fourier base frequency.
inline constexpr double kMinFourierFrequency = 1e-3;

/// s(psi) = c + R(phi) [a cos psi, b sin psi]^T, traversed counterclockwise.
struct EllipseParams {
    double center_x = 0.0;
    double center_y = 0.0;
    double major = 1.0;
    double minor = 1.0;
    double orientation = 0.0;
};

/// s_x(psi) = a_0 + sum_g a_g sin(2 pi g f_x psi + phi^x_g), likewise for y.
/// Only f_x is optimized; f_y stays at its initial value.
struct FourierParams {
    double freq_x = 0.0;
    double freq_y = 0.0;
    Eigen::VectorXd x_coeffs;  // a_0 .. a_Gx
    Eigen::VectorXd y_coeffs;  // b_0 .. b_Gy
    Eigen::VectorXd x_phases;  // phi^x_1 .. phi^x_Gx
    Eigen::VectorXd y_phases;  // phi^y_1 .. phi^y_Gy

    int order_x() const { return static_cast<int>(x_phases.size()); }
    int order_y() const { return static_cast<int>(y_phases.size()); }
};

using TrajectoryParams = std::variant<EllipseParams, FourierParams>;

enum class Family { Ellipse, Fourier };

Family family_of(const TrajectoryParams& params);
std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Fourier set with the given harmonic orders, zero amplitudes and unit-period
/// base frequencies (f = 1/(2 pi)).
FourierParams make_fourier(int order_x, int order_y);

/// Number of optimized parameters: 5 for an ellipse, 3 + 2Gx + 2Gy for Fourier.
Eigen::Index parameter_count(const TrajectoryParams& params);

/// Optimized parameters in canonical order: ellipse (X, Y, a, b, phi);
/// Fourier (f_x, a_0..a_Gx, b_0..b_Gy, phi^x_1..Gx, phi^y_1..Gy).
Eigen::VectorXd to_vector(const TrajectoryParams& params);

/// Inverse of to_vector; non-optimized fields (f_y, harmonic orders) come
/// from `shape`.
TrajectoryParams from_vector(const TrajectoryParams& shape, const Eigen::Ref<const Eigen::VectorXd>& theta);

std::vector<std::string> parameter_names(const TrajectoryParams& params);

/// Throws ValidationError if the parameter set violates its family invariants.
void validate(const TrajectoryParams& params);

/// Projects onto the feasible set: orientation/phases wrapped to [0, 2 pi),
/// axes floored at kMinMinorAxis and swapped (phi + pi/2) when b > a,
/// centre (or Fourier offsets) clamped into `space`,
/// f_x >= kMinFourierFrequency.
void enforce_feasible(TrajectoryParams& params, const MissionSpace& space);

/// Box part of the feasible set in to_vector order (unbounded entries are +-inf).
struct ParameterBounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

ParameterBounds parameter_bounds(const TrajectoryParams& params, const MissionSpace& space);

/// Curve derivatives with respect to the anomaly at one point, plus the
/// parameter partials of the first three of them.
struct CurveJet {
    Vec2 pos;  // s
    Vec2 d1;   // ds/dpsi
    Vec2 d2;   // d2s/dpsi2
    Vec2 d3;   // d3s/dpsi3
    Jacobian2 pos_partials;  // ds/dTheta
    Jacobian2 d1_partials;   // d(ds/dpsi)/dTheta
    Jacobian2 d2_partials;   // d(d2s/dpsi2)/dTheta
};

CurveJet evaluate(const TrajectoryParams& params, double anomaly, bool with_partials = true);

Vec2 position(const TrajectoryParams& params, double anomaly);
Vec2 velocity(const TrajectoryParams& params, double anomaly, double anomaly_rate);

/// ||ds/dpsi||^2.
double speed_coefficient(const TrajectoryParams& params, double anomaly);

/// Non-negative anomaly rate giving the requested speed.
double solve_rate_for_speed(const TrajectoryParams& params, double anomaly, double speed);

struct AnomalyAccel {
    double value = 0.0;
    /// False when ||s''|| = u_max has no real root and the vertex root was used.
    bool feasible = true;
};

/// Anomaly acceleration with ||psi'' d1 + psi'^2 d2|| = max_accel, choosing the
/// root with the larger tangential speed growth.
AnomalyAccel solve_anomaly_accel(const TrajectoryParams& params, double anomaly, double anomaly_rate,
                                 double max_accel);

enum class MotionPhase { Accelerating, Cruising };

struct TrajectoryState {
    double anomaly = 0.0;
    double anomaly_rate = 0.0;
    MotionPhase phase = MotionPhase::Accelerating;
};

struct StepOutcome {
    TrajectoryState state;
    /// Offset within the step at which the speed crossed max_speed.
    std::optional<double> crossed_max_speed;
    /// False if the acceleration quadratic fell back to its vertex root.
    bool feasible = true;
};

/// Advances one grid step under the max-acceleration / max-speed phase logic.
StepOutcome step(const TrajectoryParams& params, const TrajectoryState& state, double dt, const AgentSpec& spec);

/// Position, velocity and their partials with respect to the agent's
/// parameters at a fixed anomaly and anomaly rate.
struct KinematicSample {
    Vec2 position;
    Vec2 velocity;
    Jacobian2 pos_partials;
    Jacobian2 vel_partials;
};

struct ParamPartials {
    Jacobian2 pos;
    Jacobian2 vel;
};

/// Partials of position and velocity with (psi, psi') held fixed.
ParamPartials param_partials(const TrajectoryParams& params, double anomaly, double anomaly_rate);

/// Sample at the given state, with partials holding the anomaly fixed.
KinematicSample sample(const TrajectoryParams& params, const TrajectoryState& state);

/// Derivatives of the anomaly schedule with respect to the agent's parameters.
struct PathSensitivity {
    Eigen::RowVectorXd anomaly;
    Eigen::RowVectorXd anomaly_rate;

    static PathSensitivity zero(Eigen::Index count) {
        return {Eigen::RowVectorXd::Zero(count), Eigen::RowVectorXd::Zero(count)};
    }
};

/// Forward sensitivity of `step`: differentiates the step recursion,
/// including the rate and acceleration solves, with respect to Theta.
PathSensitivity path_sensitivity_step(const TrajectoryParams& params, const TrajectoryState& state,
                                      const PathSensitivity& sens, double dt, const AgentSpec& spec);

/// `step` and `path_sensitivity_step` fused, sharing the curve evaluations.
StepOutcome step_with_sensitivity(const TrajectoryParams& params, const TrajectoryState& state,
                                  PathSensitivity& sens, double dt, const AgentSpec& spec);

/// Sample whose partials include the anomaly-schedule chain terms.
KinematicSample total_sample(const TrajectoryParams& params, const TrajectoryState& state,
                             const PathSensitivity& sens);

}  // namespace pm
