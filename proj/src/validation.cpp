#include "pm/validation.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace pm {

std::string_view to_string(FdMode mode) { return mode == FdMode::Full ? "full" : "frozen_schedule"; }

FdMode fd_mode_from_string(std::string_view name) {
    if (name == "full") return FdMode::Full;
    if (name == "frozen_schedule" || name == "frozen") return FdMode::FrozenSchedule;
    throw std::invalid_argument("unknown finite-difference mode '" + std::string(name) + "'");
}

FdMode matched_fd_mode(GradMode mode) { return mode == GradMode::Total ? FdMode::Full : FdMode::FrozenSchedule; }

namespace {

using Signature = std::vector<std::tuple<int, int, int, long>>;

Signature signature(const std::vector<Event>& events) {
    Signature sig;
    sig.reserve(events.size());
    for (const auto& e : events) sig.emplace_back(static_cast<int>(e.kind), e.indices[0], e.indices[1], e.step);
    return sig;
}

}  // namespace

FdGradient fd_gradient_detailed(const Scenario& scenario, std::span<const TrajectoryParams> params, double h,
                                FdMode mode, SensingModel sensing) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    SimOptions opts;
    opts.grad_mode = GradMode::None;
    opts.sensing = sensing;
    opts.trace_stride = 0;

    AnomalySchedule schedule;
    if (mode == FdMode::FrozenSchedule) {
        SimOptions base = opts;
        base.record_schedule = true;
        schedule = simulate(scenario, params, base).schedule;
        opts.frozen_schedule = &schedule;
    }

    const Eigen::VectorXd theta = stack_parameters(params);
    FdGradient out{Eigen::VectorXd::Zero(theta.size()), std::vector<bool>(theta.size(), false)};
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        Eigen::VectorXd plus = theta, minus = theta;
        plus[k] += h;
        minus[k] -= h;
        const SimResult rp = simulate(scenario, unstack_parameters(params, plus), opts);
        const SimResult rm = simulate(scenario, unstack_parameters(params, minus), opts);
        out.gradient[k] = (rp.J - rm.J) / (2.0 * h);
        out.event_mismatch[k] = signature(rp.events) != signature(rm.events);
    }
    return out;
}

Eigen::VectorXd fd_gradient(const Scenario& scenario, std::span<const TrajectoryParams> params, double h, FdMode mode,
                            SensingModel sensing) {
    return fd_gradient_detailed(scenario, params, h, mode, sensing).gradient;
}

GradCheckReport check(const Scenario& scenario, std::span<const TrajectoryParams> params, GradMode grad_mode,
                      double tolerance, const CheckOptions& options) {
    if (grad_mode == GradMode::None) throw std::invalid_argument("gradient check needs a gradient mode");
    GradCheckReport report;
    report.grad_mode = grad_mode;
    report.fd_mode = options.fd_mode.value_or(matched_fd_mode(grad_mode));
    report.h = options.h;
    report.tolerance = tolerance;
    report.activity_floor = options.activity_floor;

    SimOptions opts;
    opts.grad_mode = grad_mode;
    opts.sensing = options.sensing;
    opts.trace_stride = 0;
    const Eigen::VectorXd analytic = simulate(scenario, params, opts).grad;
    const FdGradient fd = fd_gradient_detailed(scenario, params, options.h, report.fd_mode, options.sensing);

    Eigen::Index k = 0;
    for (std::size_t n = 0; n < params.size(); ++n) {
        for (const auto& name : parameter_names(params[n])) {
            GradComponent c;
            c.name = "agent" + std::to_string(n) + "." + name;
            c.analytic = analytic[k];
            c.numeric = fd.gradient[k];
            c.abs_error = std::abs(c.analytic - c.numeric);
            c.active = std::abs(c.numeric) > options.activity_floor;
            c.rel_error = c.active ? c.abs_error / std::abs(c.numeric) : 0.0;
            c.excluded = fd.event_mismatch[k];
            if (c.excluded) ++report.excluded;
            if (c.active && !c.excluded) report.max_rel_error = std::max(report.max_rel_error, c.rel_error);
            report.components.push_back(std::move(c));
            ++k;
        }
    }
    report.pass = report.max_rel_error <= tolerance;
    return report;
}

std::string GradCheckReport::to_json() const {
    nlohmann::json doc;
    doc["grad_mode"] = std::string(pm::to_string(grad_mode));
    doc["fd_mode"] = std::string(pm::to_string(fd_mode));
    doc["h"] = h;
    doc["tolerance"] = tolerance;
    doc["activity_floor"] = activity_floor;
    doc["max_rel_error"] = max_rel_error;
    doc["excluded"] = excluded;
    doc["pass"] = pass;
    doc["components"] = nlohmann::json::array();
    for (const auto& c : components) {
        doc["components"].push_back({{"name", c.name},
                                     {"analytic", c.analytic},
                                     {"numeric", c.numeric},
                                     {"abs_error", c.abs_error},
                                     {"rel_error", c.rel_error},
                                     {"active", c.active},
                                     {"excluded", c.excluded}});
    }
    return doc.dump(2);
}

}  // namespace pm
