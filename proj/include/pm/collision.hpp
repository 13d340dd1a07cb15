#pragma once

#include "pm/event.hpp"
#include "pm/scenario.hpp"
#include "pm/types.hpp"

#include <limits>
#include <span>
#include <vector>

namespace pm {

/// min(0, ||s_p - s_q|| - rho_p - rho_q - margin).
double pair_deficit(const Vec2& s_p, const Vec2& s_q, double rho_p, double rho_q, double margin);

/// min(0, ||center - s|| - r - rho - margin).
double obstacle_deficit(const Vec2& center, const Vec2& s, double radius, double rho, double margin);

/// Signed clearances (separation minus threshold) for every agent pair and
/// every (obstacle, agent) pair. The deficits are min(0, clearance).
struct ClearanceReport {
    /// Unordered pairs p < q in lexicographic order.
    std::vector<double> pair_clearance;
    /// Row-major (obstacle, agent).
    std::vector<double> obstacle_clearance;
    double min_pair_distance = std::numeric_limits<double>::infinity();
    double min_obstacle_distance = std::numeric_limits<double>::infinity();

    double pair_sum() const;      // J2 integrand
    double obstacle_sum() const;  // J3 integrand
};

ClearanceReport clearance(std::span<const Vec2> positions, const Scenario& scenario);

struct PenaltySample {
    double agent_term = 0.0;     // J2(t)
    double obstacle_term = 0.0;  // J3(t)
    std::vector<Event> events;
    ClearanceReport report;
};

/// Evaluates the penalty integrands on successive grid samples and reports
/// zeta / delta events whenever a deficit switches between zero and negative.
class ClearanceMonitor {
public:
    explicit ClearanceMonitor(const Scenario& scenario) : scenario_(&scenario) {}

    PenaltySample penalty_integrands(std::span<const Vec2> positions, double t, long step_index = 0);

private:
    const Scenario* scenario_;
    ClearanceReport previous_;
    double previous_time_ = 0.0;
    bool has_previous_ = false;
};

/// Gradients of J2(t) and J3(t) over the stacked parameter vector.
struct DeficitGradients {
    Eigen::VectorXd agent_term;
    Eigen::VectorXd obstacle_term;
    /// Active pairs whose two points coincided (direction undefined, skipped).
    int coincident = 0;
};

/// `pos_partials[n]` holds ds_n/dTheta_n; `offsets[n]` is the first column of
/// agent n's block in the stacked vector of length `total`.
DeficitGradients deficit_gradients(std::span<const Vec2> positions, std::span<const Jacobian2> pos_partials,
                                   std::span<const Eigen::Index> offsets, Eigen::Index total,
                                   const Scenario& scenario);

}  // namespace pm
