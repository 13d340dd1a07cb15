#include "pm/sensing.hpp"

#include <cassert>

namespace pm {

namespace {

struct LocalSensing {
    double prob = 0.0;
    DetectionPartials partials;
};

// Probability of one agent and its partials, ignoring the other agents.
LocalSensing local_sensing(const Vec2& pos, const Vec2& vel, const Vec2& target, const AgentSpec& spec,
                           SensingModel model, bool with_partials) {
    LocalSensing out;
    const Vec2 offset = pos - target;
    const double dist = offset.norm();
    if (dist > spec.sensing_range) return out;
    const double dist_factor = 1.0 - dist / spec.sensing_range;

    if (model == SensingModel::DistanceOnly) {
        out.prob = dist_factor;
        if (with_partials && dist > 0.0) out.partials.d_pos = -offset / (spec.sensing_range * dist);
        return out;
    }

    const double speed = vel.norm();
    if (speed > spec.speed_threshold) return out;
    const double speed_factor = 1.0 - speed / spec.speed_threshold;
    out.prob = dist_factor * speed_factor;
    if (with_partials) {
        if (dist > 0.0) out.partials.d_pos = -speed_factor * offset / (spec.sensing_range * dist);
        if (speed > 0.0) out.partials.d_vel = -dist_factor * vel / (spec.speed_threshold * speed);
    }
    return out;
}

}  // namespace

std::string_view to_string(SensingModel model) {
    return model == SensingModel::VelocityDependent ? "velocity" : "distance-only";
}

SensingModel sensing_model_from_string(std::string_view name) {
    if (name == "velocity") return SensingModel::VelocityDependent;
    if (name == "distance-only") return SensingModel::DistanceOnly;
    throw ParseError("unknown sensing model '" + std::string(name) + "'");
}

double detection_prob(const Vec2& agent_pos, const Vec2& agent_vel, const Vec2& target, const AgentSpec& spec,
                      SensingModel model) {
    return local_sensing(agent_pos, agent_vel, target, spec, model, false).prob;
}

double joint_detection(std::span<const double> probs) {
    double miss = 1.0;
    for (double p : probs) miss *= 1.0 - p;
    return 1.0 - miss;
}

std::vector<DetectionPartials> detection_partials(std::span<const Vec2> positions, std::span<const Vec2> velocities,
                                                  const Vec2& target, std::span<const AgentSpec> specs,
                                                  SensingModel model) {
    assert(positions.size() == velocities.size() && positions.size() == specs.size());
    const std::size_t n = positions.size();
    std::vector<LocalSensing> local(n);
    for (std::size_t k = 0; k < n; ++k) {
        local[k] = local_sensing(positions[k], velocities[k], target, specs[k], model, true);
    }

    std::vector<DetectionPartials> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double others_miss = 1.0;
        for (std::size_t m = 0; m < n; ++m) {
            if (m != k) others_miss *= 1.0 - local[m].prob;
        }
        out[k].d_pos = others_miss * local[k].partials.d_pos;
        out[k].d_vel = others_miss * local[k].partials.d_vel;
    }
    return out;
}

}  // namespace pm
