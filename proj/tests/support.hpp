#pragma once

#include "pm/kinematics.hpp"
#include "pm/scenario.hpp"

#include <numbers>
#include <random>
#include <vector>

namespace pmtest {

// 10 x 5 space, two unit targets at (3, 2.5) and (6, 2.5), T = 20.
inline pm::Scenario two_targets(int agents) {
    pm::Scenario s;
    s.space = {10.0, 5.0};
    s.targets = {{pm::Vec2(3.0, 2.5), 1.0, 1.0, 0.0}, {pm::Vec2(6.0, 2.5), 1.0, 1.0, 0.0}};
    s.agents.assign(static_cast<std::size_t>(agents), pm::AgentSpec{});
    s.horizon = 20.0;
    s.decay_rate = 15.0;
    s.time_step = 0.01;
    return s;
}

inline std::vector<pm::TrajectoryParams> single_ellipse() {
    return {pm::EllipseParams{4.5, 2.5, 2.0, 1.0, 0.3}};
}

// second scenario of the gradient checks: obstacle deficit active, pair clear
inline pm::Scenario two_agents_one_obstacle() {
    auto s = two_targets(2);
    s.obstacles = {{pm::Vec2(4.5, 4.2), 0.5}};
    return s;
}

inline std::vector<pm::TrajectoryParams> two_ellipses() {
    return {pm::EllipseParams{4.5, 2.5, 2.0, 1.0, 0.3}, pm::EllipseParams{7.8, 2.2, 1.1, 0.7, 1.0}};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline pm::EllipseParams random_ellipse(std::mt19937_64& rng) {
    pm::EllipseParams e;
    e.center_x = uniform(rng, 1.0, 9.0);
    e.center_y = uniform(rng, 1.0, 4.0);
    e.major = uniform(rng, 0.5, 3.0);
    e.minor = uniform(rng, 0.3, e.major);
    e.orientation = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return e;
}

inline pm::FourierParams random_fourier(std::mt19937_64& rng, int order = 2) {
    auto f = pm::make_fourier(order, order);
    f.freq_x *= uniform(rng, 0.5, 2.0);
    f.freq_y *= uniform(rng, 0.5, 2.0);
    f.x_coeffs(0) = uniform(rng, 2.0, 8.0);
    f.y_coeffs(0) = uniform(rng, 1.0, 4.0);
    for (int g = 1; g <= order; ++g) {
        f.x_coeffs(g) = uniform(rng, 0.2, 2.0);
        f.y_coeffs(g) = uniform(rng, 0.2, 2.0);
        f.x_phases(g - 1) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        f.y_phases(g - 1) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }
    return f;
}

}  // namespace pmtest
