#pragma once

#include "pm/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pm {

struct MissionSpace {
    double width = 0.0;   // L1
    double height = 0.0;  // L2

    bool contains(const Vec2& p) const {
        return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= height;
    }
};

struct Target {
    Vec2 position = Vec2::Zero();
    double weight = 1.0;
    double growth_rate = 1.0;
    double initial_uncertainty = 0.0;
};

/// Obstacle covered by its circumscribed circle.
struct Obstacle {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

struct AgentSpec {
    double max_accel = 1.0;
    double max_speed = 1.5;
    double sensing_range = 2.0;
    /// Speed above which the sensor detects nothing; must exceed max_speed.
    double speed_threshold = 5.0;
    double safety_radius = 0.2;
};

struct PenaltyConfig {
    double agent_penalty = -30000.0;     // M2
    double obstacle_penalty = -30000.0;  // M3
    /// Extra clearance added to every collision threshold.
    double margin = 0.02;
};

struct Scenario {
    MissionSpace space;
    std::vector<Target> targets;
    std::vector<Obstacle> obstacles;
    std::vector<AgentSpec> agents;
    PenaltyConfig penalties;
    double horizon = 0.0;     // T
    double decay_rate = 0.0;  // B
    double time_step = 0.01;  // dt

    /// Number of uniform grid steps covering [0, T).
    long step_count() const;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Parses and validates a JSON scenario document. Unknown keys are rejected.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serializes to the document format accepted by load_scenario.
std::string dump_scenario(const Scenario& scenario);

/// Single agent, two obstacles, 66 grid targets on [0,10]x[0,5], T = 40.
Scenario builtin_case_a();

/// Two agents, four heavier targets along x = 5, T = 30.
Scenario builtin_case_b();

/// "case-a" / "case-b", or nullopt for any other name.
std::optional<Scenario> builtin_scenario(std::string_view name);

}  // namespace pm
