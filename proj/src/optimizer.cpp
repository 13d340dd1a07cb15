#include "pm/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

namespace pm {

std::string_view to_string(Termination reason) {
    switch (reason) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::ZeroGradient: return "zero-gradient";
    case Termination::LineSearchExhausted: return "line-search-exhausted";
    case Termination::Failed: return "failed";
    }
    return "?";
}

void validate(const OptOptions& o) {
    if (!(o.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (o.max_iters < 1) throw ValidationError("max_iters must be at least 1");
    if (o.starts < 1) throw ValidationError("starts must be at least 1");
    if (o.grad_mode == GradMode::None) throw ValidationError("optimization needs a gradient mode");
    if (const auto* a = std::get_if<ArmijoStep>(&o.step_rule)) {
        if (!(a->initial > 0.0)) throw ValidationError("armijo initial step must be positive");
        if (!(a->shrink > 0.0 && a->shrink < 1.0)) throw ValidationError("armijo shrink must lie in (0,1)");
        if (!(a->c > 0.0 && a->c < 1.0)) throw ValidationError("armijo c must lie in (0,1)");
        if (a->max_backtracks < 0) throw ValidationError("armijo max_backtracks must be non-negative");
    } else if (!(std::get<FixedStep>(o.step_rule).alpha > 0.0)) {
        throw ValidationError("fixed step size must be positive");
    }
}

namespace {

struct Point {
    std::vector<TrajectoryParams> params;
    SimResult sim;
};

struct Candidate {
    std::vector<TrajectoryParams> params;
    /// Box-clamped displacement, before angle wrapping or axis relabelling.
    Eigen::VectorXd displacement;
};

Candidate projected_step(const Scenario& scenario, const std::vector<TrajectoryParams>& params,
                         const Eigen::VectorXd& grad, double alpha) {
    const Eigen::VectorXd theta = stack_parameters(params);
    Eigen::VectorXd next = theta - alpha * grad;
    Eigen::Index at = 0;
    for (const auto& p : params) {
        const auto box = parameter_bounds(p, scenario.space);
        const Eigen::Index n = box.lower.size();
        next.segment(at, n) = next.segment(at, n).cwiseMax(box.lower).cwiseMin(box.upper);
        at += n;
    }
    Candidate out{unstack_parameters(params, next), next - theta};
    for (auto& p : out.params) enforce_feasible(p, scenario.space);
    return out;
}

bool collision_free(const SimResult& sim) { return sim.J2 == 0.0 && sim.J3 == 0.0; }

// Collision-free iterates rank ahead of any iterate with a penalty term.
bool better(bool free_a, double J_a, bool free_b, double J_b) {
    if (free_a != free_b) return free_a;
    return J_a < J_b;
}

Iterate log_row(int start, int h, const SimResult& sim, double alpha) {
    return {start, h, sim.J, sim.J1, sim.J2, sim.J3, alpha, sim.grad.norm()};
}

StartOutcome run_start(const Scenario& scenario, int index, std::vector<TrajectoryParams> init,
                       const OptOptions& options, SimOptions sim_options, std::vector<Iterate>& log) {
    StartOutcome out;
    out.index = index;
    out.initial = init;
    for (auto& p : init) enforce_feasible(p, scenario.space);

    Point current;
    try {
        current = {init, simulate(scenario, init, sim_options)};
    } catch (const std::exception& e) {
        out.error = e.what();
        return out;
    }
    log.push_back(log_row(index, 0, current.sim, 0.0));
    out.params = current.params;
    out.J = current.sim.J;
    out.collision_free = collision_free(current.sim);

    for (int h = 1; h <= options.max_iters; ++h) {
        out.iterations = h;
        const Eigen::VectorXd& g = current.sim.grad;
        const double g2 = g.squaredNorm();
        if (g2 == 0.0) {
            // Nothing sensed: the iterate cannot move.
            log.push_back(log_row(index, h, current.sim, 0.0));
            out.termination = Termination::ZeroGradient;
            return out;
        }

        std::optional<Point> next;
        double alpha = 0.0;
        if (const auto* fixed = std::get_if<FixedStep>(&options.step_rule)) {
            alpha = fixed->alpha;
            auto cand = projected_step(scenario, current.params, g, alpha);
            try {
                next = Point{cand.params, simulate(scenario, cand.params, sim_options)};
            } catch (const DegenerateGeometryError& e) {
                out.error = e.what();
                out.termination = Termination::Failed;
                return out;
            }
        } else {
            const auto& rule = std::get<ArmijoStep>(options.step_rule);
            alpha = rule.initial;
            if (rule.max_step > 0.0) alpha = std::min(alpha, rule.max_step / std::sqrt(g2));
            for (int k = 0; k <= rule.max_backtracks; ++k, alpha *= rule.shrink) {
                auto cand = projected_step(scenario, current.params, g, alpha);
                // Sufficient decrease along the projection arc; equals c alpha ||g||^2
                // when no bound is active.
                const double slope = g.dot(cand.displacement);
                try {
                    SimResult sim = simulate(scenario, cand.params, sim_options);
                    if (sim.J <= current.sim.J + rule.c * slope && sim.J < current.sim.J) {
                        next = Point{std::move(cand.params), std::move(sim)};
                        break;
                    }
                } catch (const DegenerateGeometryError&) {
                    // Treated as a rejected trial step.
                }
            }
            if (!next) {
                out.termination = Termination::LineSearchExhausted;
                return out;
            }
        }

        const double delta = next->sim.J - current.sim.J;
        current = std::move(*next);
        log.push_back(log_row(index, h, current.sim, alpha));
        if (better(collision_free(current.sim), current.sim.J, out.collision_free, out.J)) {
            out.J = current.sim.J;
            out.params = current.params;
            out.collision_free = collision_free(current.sim);
        }
        if (std::abs(delta) < options.epsilon) {
            out.termination = Termination::Converged;
            return out;
        }
    }
    out.termination = Termination::MaxIterations;
    return out;
}

}  // namespace

OptResult optimize(const Scenario& scenario, const std::vector<std::vector<TrajectoryParams>>& initializations,
                   const OptOptions& options) {
    validate(options);
    if (initializations.empty()) throw ValidationError("at least one initialization is required");

    SimOptions sim_options;
    sim_options.grad_mode = options.grad_mode;
    sim_options.sensing = options.sensing;
    sim_options.trace_stride = 0;

    OptResult result;
    for (std::size_t s = 0; s < initializations.size(); ++s) {
        result.starts.push_back(
            run_start(scenario, static_cast<int>(s), initializations[s], options, sim_options, result.iterates));
    }
    bool best_free = false;
    for (const auto& st : result.starts) {
        if (st.params.empty()) continue;
        if (result.start_index < 0 || better(st.collision_free, st.J, best_free, result.best_J)) {
            best_free = st.collision_free;
            result.start_index = st.index;
            result.best_J = st.J;
            result.best_params = st.params;
        }
    }
    if (result.start_index < 0) {
        std::string msg = "all " + std::to_string(result.starts.size()) + " starts failed";
        if (!result.starts.empty() && !result.starts.front().error.empty()) msg += ": " + result.starts.front().error;
        throw AllStartsFailedError(msg);
    }
    SimOptions final_options = sim_options;
    final_options.trace_stride = 1;
    result.final_run = simulate(scenario, result.best_params, final_options);
    return result;
}

std::vector<std::vector<TrajectoryParams>> random_initializations(const Scenario& scenario, Family family, int count,
                                                                  std::uint64_t seed, int fourier_order) {
    if (count < 1) throw ValidationError("count must be at least 1");
    if (fourier_order < 1) throw ValidationError("Fourier order must be at least 1");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const double L1 = scenario.space.width;
    const double L2 = scenario.space.height;

    std::vector<std::vector<TrajectoryParams>> out(count);
    for (auto& set : out) {
        for (std::size_t n = 0; n < scenario.agents.size(); ++n) {
            if (family == Family::Ellipse) {
                EllipseParams e;
                e.center_x = uniform(0.0, L1);
                e.center_y = uniform(0.0, L2);
                const double hi = std::max(0.5, std::min(L1, L2) / 2.0);
                double a = uniform(0.5, hi);
                double b = uniform(0.5, hi);
                if (a < b) std::swap(a, b);
                e.major = a;
                e.minor = b;
                e.orientation = uniform(0.0, two_pi);
                set.emplace_back(e);
            } else {
                FourierParams f = make_fourier(fourier_order, fourier_order);
                f.x_coeffs(0) = uniform(0.0, L1);
                f.y_coeffs(0) = uniform(0.0, L2);
                for (int g = 1; g <= fourier_order; ++g) {
                    f.x_coeffs(g) = uniform(0.2, 2.0);
                    f.y_coeffs(g) = uniform(0.2, 2.0);
                }
                for (auto& ph : f.x_phases) ph = uniform(0.0, two_pi);
                for (auto& ph : f.y_phases) ph = uniform(0.0, two_pi);
                set.emplace_back(std::move(f));
            }
        }
    }
    return out;
}

void write_convergence_csv(std::ostream& out, const std::vector<Iterate>& iterates) {
    out << "start,h,J,J1,J2,J3,alpha,grad_norm\n";
    char buf[256];
    for (const auto& it : iterates) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", it.start, it.h, it.J, it.J1, it.J2,
                      it.J3, it.alpha, it.grad_norm);
        out << buf;
    }
}

}  // namespace pm
