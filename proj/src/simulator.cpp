#include "pm/simulator.hpp"

#include "pm/collision.hpp"
#include "pm/uncertainty.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pm {

std::string_view to_string(GradMode mode) {
    switch (mode) {
    case GradMode::None: return "none";
    case GradMode::Paper: return "paper";
    case GradMode::Total: return "total";
    }
    return "?";
}

GradMode grad_mode_from_string(std::string_view name) {
    if (name == "none") return GradMode::None;
    if (name == "paper") return GradMode::Paper;
    if (name == "total") return GradMode::Total;
    throw std::invalid_argument("unknown gradient mode '" + std::string(name) + "'");
}

std::vector<Eigen::Index> parameter_offsets(std::span<const TrajectoryParams> params) {
    std::vector<Eigen::Index> offsets;
    Eigen::Index next = 0;
    for (const auto& p : params) {
        offsets.push_back(next);
        next += parameter_count(p);
    }
    return offsets;
}

Eigen::VectorXd stack_parameters(std::span<const TrajectoryParams> params) {
    Eigen::Index total = 0;
    for (const auto& p : params) total += parameter_count(p);
    Eigen::VectorXd theta(total);
    Eigen::Index at = 0;
    for (const auto& p : params) {
        const auto v = to_vector(p);
        theta.segment(at, v.size()) = v;
        at += v.size();
    }
    return theta;
}

std::vector<TrajectoryParams> unstack_parameters(std::span<const TrajectoryParams> shape,
                                                 const Eigen::Ref<const Eigen::VectorXd>& theta) {
    std::vector<TrajectoryParams> out;
    Eigen::Index at = 0;
    for (const auto& p : shape) {
        const Eigen::Index n = parameter_count(p);
        if (at + n > theta.size()) throw std::invalid_argument("parameter vector too short");
        out.push_back(from_vector(p, theta.segment(at, n)));
        at += n;
    }
    if (at != theta.size()) throw std::invalid_argument("parameter vector too long");
    return out;
}

namespace {

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

[[noreturn]] void rethrow_annotated(const DegenerateGeometryError& e, std::size_t agent, double t) {
    throw DegenerateGeometryError("agent " + std::to_string(agent) + " at t=" + format_time(t) + ": " + e.what());
}

// ||s''|| implied by holding the speed constant along the curve: v^2 kappa.
double cruise_accel(const CurveJet& jet, double rate) {
    const double cross = jet.d1.x() * jet.d2.y() - jet.d1.y() * jet.d2.x();
    const double n1 = jet.d1.norm();
    return n1 > 0.0 ? rate * rate * std::abs(cross) / n1 : 0.0;
}

}  // namespace

SimResult simulate(const Scenario& scenario, std::span<const TrajectoryParams> params, const SimOptions& options) {
    const std::size_t N = scenario.agents.size();
    const std::size_t M = scenario.targets.size();
    if (params.size() != N) {
        throw std::invalid_argument("expected " + std::to_string(N) + " parameter sets, got " +
                                    std::to_string(params.size()));
    }
    for (const auto& p : params) {
        // Probes may step just past a >= b; the curve itself stays well defined.
        if (std::holds_alternative<FourierParams>(p)) validate(p);
        else if (!to_vector(p).allFinite()) throw ValidationError("trajectory parameters must be finite");
    }

    const AnomalySchedule* frozen = options.frozen_schedule;
    const long K = scenario.step_count();
    const double dt = scenario.time_step;
    if (frozen) {
        if (options.grad_mode == GradMode::Total)
            throw std::invalid_argument("total gradient mode cannot replay a frozen schedule");
        if (frozen->anomaly.rows() < K || frozen->anomaly.cols() != static_cast<Eigen::Index>(N))
            throw std::invalid_argument("frozen schedule does not match the scenario grid");
    }

    const GradMode mode = options.grad_mode;
    const bool want_grad = mode != GradMode::None;
    const auto offsets = parameter_offsets(params);
    const Eigen::Index P = offsets.empty() ? 0 : offsets.back() + parameter_count(params.back());

    SimResult result;
    result.grad_mode = mode;
    result.agent_penalty = scenario.penalties.agent_penalty;
    result.obstacle_penalty = scenario.penalties.obstacle_penalty;
    auto& diag = result.diagnostics;

    Eigen::VectorXd weights(M), growth(M), initial(M);
    std::vector<Vec2> target_pos(M);
    for (std::size_t i = 0; i < M; ++i) {
        weights[i] = scenario.targets[i].weight;
        growth[i] = scenario.targets[i].growth_rate;
        initial[i] = scenario.targets[i].initial_uncertainty;
        target_pos[i] = scenario.targets[i].position;
    }
    const double B = scenario.decay_rate;

    std::vector<TrajectoryState> states(N);
    std::vector<PathSensitivity> sens;
    if (mode == GradMode::Total)
        for (const auto& p : params) sens.push_back(PathSensitivity::zero(parameter_count(p)));

    UncertaintyState unc = UncertaintyState::from_values(initial);
    GradientState grad = GradientState::zero(static_cast<Eigen::Index>(M), P);
    ClearanceMonitor monitor(scenario);

    if (options.record_schedule) {
        result.schedule.anomaly.resize(K, N);
        result.schedule.anomaly_rate.resize(K, N);
    }

    std::vector<Vec2> positions(N), velocities(N);
    std::vector<KinematicSample> samples(N);
    std::vector<Jacobian2> pos_partials(N);
    std::vector<double> probs(N);
    Eigen::VectorXd detection(M), rates(M);
    Eigen::MatrixXd detection_grads = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), want_grad ? P : 0);
    std::vector<bool> pinned(M);
    const Eigen::VectorXd zeroP = Eigen::VectorXd::Zero(P);

    double sum1 = 0.0, sum2 = 0.0, sum3 = 0.0;

    for (long m = 0; m < K; ++m) {
        const double t = static_cast<double>(m) * dt;

        for (std::size_t n = 0; n < N; ++n) {
            if (frozen) {
                states[n].anomaly = frozen->anomaly(m, n);
                states[n].anomaly_rate = frozen->anomaly_rate(m, n);
            }
            const auto& st = states[n];
            CurveJet jet = evaluate(params[n], st.anomaly, want_grad);
            auto& smp = samples[n];
            smp.position = jet.pos;
            smp.velocity = st.anomaly_rate * jet.d1;
            if (mode == GradMode::Total) {
                smp.pos_partials = jet.pos_partials + jet.d1 * sens[n].anomaly;
                smp.vel_partials = st.anomaly_rate * jet.d1_partials + jet.d1 * sens[n].anomaly_rate +
                                   (st.anomaly_rate * jet.d2) * sens[n].anomaly;
            } else if (want_grad) {
                smp.pos_partials = jet.pos_partials;
                smp.vel_partials = st.anomaly_rate * jet.d1_partials;
            }
            positions[n] = smp.position;
            velocities[n] = smp.velocity;
            if (want_grad) pos_partials[n] = smp.pos_partials;

            diag.max_speed = std::max(diag.max_speed, smp.velocity.norm());
            if (!frozen && st.phase == MotionPhase::Cruising &&
                cruise_accel(jet, st.anomaly_rate) > scenario.agents[n].max_accel * (1.0 + 1e-9))
                ++diag.cruise_accel_violations;
            if (options.record_schedule) {
                result.schedule.anomaly(m, n) = st.anomaly;
                result.schedule.anomaly_rate(m, n) = st.anomaly_rate;
            }
        }

        // Sensing.
        for (std::size_t i = 0; i < M; ++i) {
            double miss = 1.0;
            bool sensed = false;
            for (std::size_t n = 0; n < N; ++n) {
                probs[n] = detection_prob(positions[n], velocities[n], target_pos[i], scenario.agents[n],
                                          options.sensing);
                miss *= 1.0 - probs[n];
                sensed = sensed || probs[n] > 0.0;
            }
            detection[i] = 1.0 - miss;
            if (want_grad) {
                auto row = detection_grads.row(static_cast<Eigen::Index>(i));
                if (sensed) {
                    const auto partials = detection_partials(positions, velocities, target_pos[i], scenario.agents,
                                                             options.sensing);
                    detection_gradient(partials, samples, offsets, row);
                    diag.gradient_excited = true;
                } else {
                    row.setZero();
                }
            }
            pinned[i] = is_pinned(unc.values[i], detection[i], growth[i], B);
            rates[i] = uncertainty_rate(unc.values[i], detection[i], growth[i], B);
        }

        // Objective integrands at t_m.
        sum1 += weights.dot(unc.values);
        PenaltySample pen = monitor.penalty_integrands(positions, t, m);
        sum2 += pen.agent_term;
        sum3 += pen.obstacle_term;
        diag.min_pair_distance = std::min(diag.min_pair_distance, pen.report.min_pair_distance);
        diag.min_obstacle_distance = std::min(diag.min_obstacle_distance, pen.report.min_obstacle_distance);
        result.events.insert(result.events.end(), pen.events.begin(), pen.events.end());

        if (want_grad) {
            if (pen.agent_term < 0.0 || pen.obstacle_term < 0.0) {
                DeficitGradients dg = deficit_gradients(positions, pos_partials, offsets, P, scenario);
                diag.coincident_points += dg.coincident;
                accumulate(grad, weights, dg.agent_term, dg.obstacle_term, dt);
            } else {
                accumulate(grad, weights, zeroP, zeroP, dt);
            }
        }

        if (options.trace_stride > 0 && m % options.trace_stride == 0) {
            result.traces.push_back({t, positions, velocities, unc.values, detection});
        }

        // Uncertainty and its sensitivity.
        UncertaintyStep us = step_uncertainty(unc, rates, t, dt, m);
        unc = std::move(us.state);
        if (want_grad) {
            propagate_dR(grad, detection_grads, pinned, B, dt);
            sort_events(us.events);
            for (const auto& ev : us.events) {
                if (options.record_event_gradients) {
                    EventGradientRecord rec;
                    rec.event = result.events.size();
                    rec.before = grad.dR.row(ev.indices[0]);
                    apply_event(grad, ev);
                    rec.after = grad.dR.row(ev.indices[0]);
                    result.event_gradients.push_back(std::move(rec));
                } else {
                    apply_event(grad, ev);
                }
                result.events.push_back(ev);
            }
        } else {
            result.events.insert(result.events.end(), us.events.begin(), us.events.end());
        }

        // Kinematics.
        if (!frozen) {
            for (std::size_t n = 0; n < N; ++n) {
                try {
                    StepOutcome out = mode == GradMode::Total
                                          ? step_with_sensitivity(params[n], states[n], sens[n], dt, scenario.agents[n])
                                          : step(params[n], states[n], dt, scenario.agents[n]);
                    if (!out.feasible) ++diag.feasibility_warnings;
                    if (out.crossed_max_speed) {
                        Event ev{EventKind::MaxSpeedReached, t + *out.crossed_max_speed, {static_cast<int>(n), -1}, m};
                        result.events.push_back(ev);
                        if (options.record_schedule) result.schedule.events.push_back(ev);
                    }
                    states[n] = out.state;
                } catch (const DegenerateGeometryError& e) {
                    rethrow_annotated(e, n, t);
                }
            }
        } else {
            for (const auto& ev : frozen->events)
                if (ev.step == m) result.events.push_back(ev);
        }
    }

    const double T = scenario.horizon;
    result.J1 = sum1 * dt / T;
    result.J2 = sum2 * dt / T;
    result.J3 = sum3 * dt / T;
    result.J = result.J1 + result.agent_penalty * result.J2 + result.obstacle_penalty * result.J3;
    if (want_grad) result.grad = assemble(grad, T, result.agent_penalty, result.obstacle_penalty);

    // Keep event-gradient records pointing at the right entries after sorting.
    if (options.record_event_gradients) {
        std::vector<std::size_t> order(result.events.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return event_before(result.events[a], result.events[b]);
        });
        std::vector<std::size_t> where(order.size());
        std::vector<Event> sorted;
        sorted.reserve(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            where[order[k]] = k;
            sorted.push_back(result.events[order[k]]);
        }
        result.events = std::move(sorted);
        for (auto& rec : result.event_gradients) rec.event = where[rec.event];
    } else {
        sort_events(result.events);
    }
    return result;
}

void write_trace_csv(std::ostream& out, const SimResult& result, std::size_t agents, std::size_t targets) {
    out << "t";
    for (std::size_t n = 1; n <= agents; ++n)
        out << ",s" << n << "x,s" << n << "y,v" << n << "x,v" << n << "y";
    for (std::size_t i = 1; i <= targets; ++i) out << ",R" << i;
    out << '\n';
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        out << buf;
    };
    for (const auto& row : result.traces) {
        put(row.t);
        for (std::size_t n = 0; n < agents; ++n) {
            out << ',';
            put(row.positions[n].x());
            out << ',';
            put(row.positions[n].y());
            out << ',';
            put(row.velocities[n].x());
            out << ',';
            put(row.velocities[n].y());
        }
        for (std::size_t i = 0; i < targets; ++i) {
            out << ',';
            put(row.uncertainty[i]);
        }
        out << '\n';
    }
}

void write_event_log(std::ostream& out, const std::vector<Event>& events) {
    for (const auto& ev : events) {
        nlohmann::ordered_json idx = nlohmann::ordered_json::array();
        for (int k = 0; k < ev.arity(); ++k) idx.push_back(ev.indices[k]);
        nlohmann::ordered_json row = {{"kind", to_string(ev.kind)}, {"time", ev.time}, {"indices", idx}};
        out << row.dump() << '\n';
    }
}

void export_traces(const SimResult& result, const Scenario& scenario, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::ofstream csv(directory / "trace.csv");
    std::ofstream log(directory / "events.jsonl");
    if (!csv || !log) throw std::runtime_error("cannot write traces into " + directory.string());
    write_trace_csv(csv, result, scenario.agents.size(), scenario.targets.size());
    write_event_log(log, result.events);
    if (!csv || !log) throw std::runtime_error("I/O failure while writing traces into " + directory.string());
}

}  // namespace pm
