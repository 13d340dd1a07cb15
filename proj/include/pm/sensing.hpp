#pragma once

#include "pm/scenario.hpp"
#include "pm/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace pm {

enum class SensingModel {
    /// p = (1 - D/r)(1 - ||v||/beta) inside the support.
    VelocityDependent,
    /// p = 1 - D/r; speed plays no role.
    DistanceOnly,
};

std::string_view to_string(SensingModel model);
SensingModel sensing_model_from_string(std::string_view name);

/// Probability that an agent at `agent_pos` moving with `agent_vel` detects an
/// event at `target`. Zero outside D <= r and ||v|| <= beta.
double detection_prob(const Vec2& agent_pos, const Vec2& agent_vel, const Vec2& target, const AgentSpec& spec,
                      SensingModel model = SensingModel::VelocityDependent);

/// 1 - prod(1 - p_n).
double joint_detection(std::span<const double> probs);

/// Partials of the joint detection probability with respect to one agent's
/// position and velocity.
struct DetectionPartials {
    Vec2 d_pos = Vec2::Zero();
    Vec2 d_vel = Vec2::Zero();
};

/// Per-agent partials of the joint probability for one target. On the support
/// boundary the interior one-sided value is used; at D = 0 or ||v|| = 0 the
/// corresponding partial is zero.
std::vector<DetectionPartials> detection_partials(std::span<const Vec2> positions, std::span<const Vec2> velocities,
                                                  const Vec2& target, std::span<const AgentSpec> specs,
                                                  SensingModel model = SensingModel::VelocityDependent);

}  // namespace pm
