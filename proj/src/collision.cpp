#include "pm/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pm {

namespace {

double negative_part(double x) { return std::min(0.0, x); }

// Linear interpolation of the zero crossing between (t0, x0) and (t1, x1).
double crossing_time(double t0, double x0, double t1, double x1) {
    const double span = x0 - x1;
    if (span == 0.0) return t1;
    return t0 + (t1 - t0) * std::clamp(x0 / span, 0.0, 1.0);
}

}  // namespace

double pair_deficit(const Vec2& s_p, const Vec2& s_q, double rho_p, double rho_q, double margin) {
    return negative_part((s_p - s_q).norm() - rho_p - rho_q - margin);
}

double obstacle_deficit(const Vec2& center, const Vec2& s, double radius, double rho, double margin) {
    return negative_part((center - s).norm() - radius - rho - margin);
}

double ClearanceReport::pair_sum() const {
    return std::accumulate(pair_clearance.begin(), pair_clearance.end(), 0.0,
                           [](double acc, double c) { return acc + negative_part(c); });
}

double ClearanceReport::obstacle_sum() const {
    return std::accumulate(obstacle_clearance.begin(), obstacle_clearance.end(), 0.0,
                           [](double acc, double c) { return acc + negative_part(c); });
}

ClearanceReport clearance(std::span<const Vec2> positions, const Scenario& scenario) {
    const auto& agents = scenario.agents;
    const double margin = scenario.penalties.margin;
    const std::size_t n = positions.size();
    ClearanceReport report;
    report.pair_clearance.reserve(n * (n - 1) / 2);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double dist = (positions[p] - positions[q]).norm();
            report.min_pair_distance = std::min(report.min_pair_distance, dist);
            report.pair_clearance.push_back(dist - agents[p].safety_radius - agents[q].safety_radius - margin);
        }
    }
    report.obstacle_clearance.reserve(scenario.obstacles.size() * n);
    for (const auto& obstacle : scenario.obstacles) {
        for (std::size_t k = 0; k < n; ++k) {
            const double dist = (obstacle.center - positions[k]).norm();
            report.min_obstacle_distance = std::min(report.min_obstacle_distance, dist);
            report.obstacle_clearance.push_back(dist - obstacle.radius - agents[k].safety_radius - margin);
        }
    }
    return report;
}

PenaltySample ClearanceMonitor::penalty_integrands(std::span<const Vec2> positions, double t, long step_index) {
    PenaltySample out;
    out.report = clearance(positions, *scenario_);
    out.agent_term = out.report.pair_sum();
    out.obstacle_term = out.report.obstacle_sum();

    if (has_previous_) {
        const std::size_t n = positions.size();
        auto detect = [&](double before, double after, EventKind restored, EventKind lost, std::array<int, 2> idx) {
            const bool was_active = before < 0.0;
            const bool is_active = after < 0.0;
            if (was_active == is_active) return;
            const double when = crossing_time(previous_time_, before, t, after);
            out.events.push_back({is_active ? lost : restored, when, idx, step_index});
        };
        std::size_t k = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q, ++k) {
                detect(previous_.pair_clearance[k], out.report.pair_clearance[k], EventKind::PairClearanceRestored,
                       EventKind::PairClearanceLost, {static_cast<int>(p), static_cast<int>(q)});
            }
        }
        for (std::size_t l = 0; l < scenario_->obstacles.size(); ++l) {
            for (std::size_t a = 0; a < n; ++a) {
                const std::size_t idx = l * n + a;
                detect(previous_.obstacle_clearance[idx], out.report.obstacle_clearance[idx],
                       EventKind::ObstacleClearanceRestored, EventKind::ObstacleClearanceLost,
                       {static_cast<int>(l), static_cast<int>(a)});
            }
        }
    }
    previous_ = out.report;
    previous_time_ = t;
    has_previous_ = true;
    return out;
}

DeficitGradients deficit_gradients(std::span<const Vec2> positions, std::span<const Jacobian2> pos_partials,
                                   std::span<const Eigen::Index> offsets, Eigen::Index total,
                                   const Scenario& scenario) {
    DeficitGradients out;
    out.agent_term = Eigen::VectorXd::Zero(total);
    out.obstacle_term = Eigen::VectorXd::Zero(total);
    const auto& agents = scenario.agents;
    const double margin = scenario.penalties.margin;
    const std::size_t n = positions.size();

    // d||partner - s_n|| / dTheta_n = -(partner - s_n)^T / ||.|| * ds_n/dTheta_n.
    auto add = [&](Eigen::VectorXd& dest, std::size_t agent, const Vec2& partner) {
        const Vec2 diff = partner - positions[agent];
        const double dist = diff.norm();
        if (dist == 0.0) return;
        const Jacobian2& jac = pos_partials[agent];
        dest.segment(offsets[agent], jac.cols()).noalias() -= jac.transpose() * (diff / dist);
    };

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double dist = (positions[p] - positions[q]).norm();
            if (dist - agents[p].safety_radius - agents[q].safety_radius - margin >= 0.0) continue;
            if (dist == 0.0) ++out.coincident;
            add(out.agent_term, p, positions[q]);
            add(out.agent_term, q, positions[p]);
        }
    }
    for (const auto& obstacle : scenario.obstacles) {
        for (std::size_t k = 0; k < n; ++k) {
            const double dist = (obstacle.center - positions[k]).norm();
            if (dist - obstacle.radius - agents[k].safety_radius - margin >= 0.0) continue;
            if (dist == 0.0) ++out.coincident;
            add(out.obstacle_term, k, obstacle.center);
        }
    }
    return out;
}

}  // namespace pm
