#include "pm/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double angle) {
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    // fmod can round up to exactly 2 pi for tiny negative inputs.
    return wrapped >= kTwoPi ? 0.0 : wrapped;
}

Eigen::Matrix2d rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

// Quarter-turn rotation J with dR(phi)/dphi = J R(phi).
Vec2 quarter_turn(const Vec2& v) { return {-v.y(), v.x()}; }

// sin(theta + k pi / 2) for k = 0..3 given sin and cos of theta.
double shifted_sin(int k, double s, double c) {
    switch (k & 3) {
        case 0: return s;
        case 1: return c;
        case 2: return -s;
        default: return -c;
    }
}

double shifted_cos(int k, double s, double c) { return shifted_sin(k + 1, s, c); }

CurveJet evaluate_ellipse(const EllipseParams& e, double psi, bool with_partials) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    const Eigen::Matrix2d rot = rotation(e.orientation);

    // k-th anomaly derivative of [a cos psi, b sin psi] is
    // [a cos(psi + k pi/2), b sin(psi + k pi/2)].
    auto local = [&](int k) { return Vec2(e.major * shifted_cos(k, s, c), e.minor * shifted_sin(k, s, c)); };

    CurveJet jet;
    jet.pos = Vec2(e.center_x, e.center_y) + rot * local(0);
    jet.d1 = rot * local(1);
    jet.d2 = rot * local(2);
    jet.d3 = rot * local(3);
    if (!with_partials) return jet;

    auto fill = [&](Jacobian2& out, int k, const Vec2& value) {
        out.setZero(2, 5);
        if (k == 0) {
            out(0, 0) = 1.0;
            out(1, 1) = 1.0;
        }
        out.col(2) = rot.col(0) * shifted_cos(k, s, c);
        out.col(3) = rot.col(1) * shifted_sin(k, s, c);
        // Rotating about the centre leaves the centre term untouched.
        out.col(4) = quarter_turn(value - (k == 0 ? Vec2(e.center_x, e.center_y) : Vec2::Zero()));
    };
    fill(jet.pos_partials, 0, jet.pos);
    fill(jet.d1_partials, 1, jet.d1);
    fill(jet.d2_partials, 2, jet.d2);
    return jet;
}

struct SeriesTerm {
    double omega;  // 2 pi g f
    double dOmega_df;  // 2 pi g
    double s;      // sin(omega psi + phase)
    double c;      // cos(omega psi + phase)
};

CurveJet evaluate_fourier(const FourierParams& f, double psi, bool with_partials) {
    const int gx = f.order_x();
    const int gy = f.order_y();

    auto term = [psi](double freq, int harmonic, double phase) {
        const double d_omega = kTwoPi * harmonic;
        const double omega = d_omega * freq;
        const double arg = omega * psi + phase;
        return SeriesTerm{omega, d_omega, std::sin(arg), std::cos(arg)};
    };

    CurveJet jet;
    jet.pos = Vec2(f.x_coeffs(0), f.y_coeffs(0));
    jet.d1.setZero();
    jet.d2.setZero();
    jet.d3.setZero();

    const Eigen::Index count = 3 + 2 * gx + 2 * gy;
    if (with_partials) {
        jet.pos_partials.setZero(2, count);
        jet.d1_partials.setZero(2, count);
        jet.d2_partials.setZero(2, count);
        jet.pos_partials(0, 1) = 1.0;
        jet.pos_partials(1, 2 + gx) = 1.0;
    }
    Jacobian2* partials[3] = {&jet.pos_partials, &jet.d1_partials, &jet.d2_partials};

    const Eigen::Index x_amp0 = 1;
    const Eigen::Index y_amp0 = 2 + gx;
    const Eigen::Index x_phase0 = 3 + gx + gy;
    const Eigen::Index y_phase0 = x_phase0 + gx;

    for (int g = 1; g <= gx; ++g) {
        const double amp = f.x_coeffs(g);
        const SeriesTerm t = term(f.freq_x, g, f.x_phases(g - 1));
        double omega_k = 1.0;  // omega^k
        for (int k = 0; k <= 3; ++k) {
            const double value = amp * omega_k * shifted_sin(k, t.s, t.c);
            if (k == 0) jet.pos.x() += value;
            if (k == 1) jet.d1.x() += value;
            if (k == 2) jet.d2.x() += value;
            if (k == 3) jet.d3.x() += value;
            if (with_partials && k <= 2) {
                Jacobian2& out = *partials[k];
                const double omega_km1 = k == 0 ? 0.0 : std::pow(t.omega, k - 1);
                out(0, 0) += amp * (k * omega_km1 * t.dOmega_df * shifted_sin(k, t.s, t.c) +
                                    omega_k * shifted_cos(k, t.s, t.c) * t.dOmega_df * psi);
                out(0, x_amp0 + g) = omega_k * shifted_sin(k, t.s, t.c);
                out(0, x_phase0 + g - 1) = amp * omega_k * shifted_cos(k, t.s, t.c);
            }
            omega_k *= t.omega;
        }
    }
    for (int g = 1; g <= gy; ++g) {
        const double amp = f.y_coeffs(g);
        const SeriesTerm t = term(f.freq_y, g, f.y_phases(g - 1));
        double omega_k = 1.0;
        for (int k = 0; k <= 3; ++k) {
            const double value = amp * omega_k * shifted_sin(k, t.s, t.c);
            if (k == 0) jet.pos.y() += value;
            if (k == 1) jet.d1.y() += value;
            if (k == 2) jet.d2.y() += value;
            if (k == 3) jet.d3.y() += value;
            if (with_partials && k <= 2) {
                Jacobian2& out = *partials[k];
                out(1, y_amp0 + g) = omega_k * shifted_sin(k, t.s, t.c);
                out(1, y_phase0 + g - 1) = amp * omega_k * shifted_cos(k, t.s, t.c);
            }
            omega_k *= t.omega;
        }
    }
    return jet;
}

double checked_coefficient(const Vec2& d1) {
    const double g = d1.squaredNorm();
    if (!(g >= kSpeedCoefficientFloor)) {
        throw DegenerateGeometryError("trajectory is stationary with respect to its path parameter (||ds/dpsi||^2 = " +
                                      std::to_string(g) + ")");
    }
    return g;
}

AnomalyAccel accel_from_jet(const CurveJet& jet, double rate, double max_accel) {
    const double a = checked_coefficient(jet.d1);
    const double rate2 = rate * rate;
    const double b = 2.0 * rate2 * jet.d1.dot(jet.d2);
    const double c = rate2 * rate2 * jet.d2.squaredNorm() - max_accel * max_accel;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {-b / (2.0 * a), false};
    // Tangential speed growth is sqrt(disc)/(2 sqrt(a)) for the + root, so it
    // is always the speed-growing one.
    return {(-b + std::sqrt(disc)) / (2.0 * a), true};
}

// d(psi'')/dTheta for the root returned by accel_from_jet.
Eigen::RowVectorXd accel_sensitivity(const CurveJet& jet, double rate, const AnomalyAccel& acc,
                                     const PathSensitivity& sens) {
    const Jacobian2 de1 = jet.d2 * sens.anomaly + jet.d1_partials;
    const Jacobian2 de2 = jet.d3 * sens.anomaly + jet.d2_partials;
    const double rate2 = rate * rate;
    const double a = jet.d1.squaredNorm();
    const double e12 = jet.d1.dot(jet.d2);
    const double b = 2.0 * rate2 * e12;

    const Eigen::RowVectorXd da = 2.0 * jet.d1.transpose() * de1;
    const Eigen::RowVectorXd db =
        2.0 * (2.0 * rate * e12 * sens.anomaly_rate + rate2 * (jet.d2.transpose() * de1 + jet.d1.transpose() * de2));
    if (!acc.feasible) {
        return -db / (2.0 * a) + (b / (2.0 * a * a)) * da;
    }
    const Eigen::RowVectorXd dc = 4.0 * rate2 * rate * jet.d2.squaredNorm() * sens.anomaly_rate +
                                  2.0 * rate2 * rate2 * (jet.d2.transpose() * de2);
    const double x = acc.value;
    return -(x * x * da + x * db + dc) / (2.0 * a * x + b);
}

// d(rate)/dTheta for rate = speed / sqrt(g) at a point whose anomaly has
// sensitivity `d_anomaly`.
Eigen::RowVectorXd rate_sensitivity(const CurveJet& jet, double rate, const Eigen::RowVectorXd& d_anomaly) {
    const double g = jet.d1.squaredNorm();
    const Eigen::RowVectorXd dg = 2.0 * jet.d1.transpose() * (jet.d2 * d_anomaly + jet.d1_partials);
    return (-rate / (2.0 * g)) * dg;
}

StepOutcome advance(const TrajectoryParams& params, const TrajectoryState& state, double dt, const AgentSpec& spec,
                    PathSensitivity* sens) {
    const bool with_partials = sens != nullptr;
    StepOutcome out;
    TrajectoryState& next = out.state;
    next.phase = state.phase;

    if (state.phase == MotionPhase::Accelerating) {
        const CurveJet jet0 = evaluate(params, state.anomaly, with_partials);
        const double g0 = checked_coefficient(jet0.d1);
        const AnomalyAccel acc = accel_from_jet(jet0, state.anomaly_rate, spec.max_accel);
        out.feasible = acc.feasible;

        next.anomaly = state.anomaly + state.anomaly_rate * dt + 0.5 * acc.value * dt * dt;
        next.anomaly_rate = state.anomaly_rate + acc.value * dt;

        const CurveJet jet1 = evaluate(params, next.anomaly, with_partials);
        const double g1 = checked_coefficient(jet1.d1);
        const double speed0 = state.anomaly_rate * std::sqrt(g0);
        const double speed1 = next.anomaly_rate * std::sqrt(g1);
        const bool crossed = speed1 >= spec.max_speed;
        if (crossed) {
            const double span = speed1 - speed0;
            const double frac = span > 0.0 ? std::clamp((spec.max_speed - speed0) / span, 0.0, 1.0) : 1.0;
            out.crossed_max_speed = frac * dt;
            next.phase = MotionPhase::Cruising;
            next.anomaly_rate = spec.max_speed / std::sqrt(g1);
        }

        if (sens) {
            const Eigen::RowVectorXd d_accel = accel_sensitivity(jet0, state.anomaly_rate, acc, *sens);
            const Eigen::RowVectorXd d_anomaly =
                sens->anomaly + dt * sens->anomaly_rate + (0.5 * dt * dt) * d_accel;
            if (crossed) {
                sens->anomaly_rate = rate_sensitivity(jet1, next.anomaly_rate, d_anomaly);
            } else {
                sens->anomaly_rate += dt * d_accel;
            }
            sens->anomaly = d_anomaly;
        }
    } else {
        next.anomaly = state.anomaly + state.anomaly_rate * dt;
        const CurveJet jet1 = evaluate(params, next.anomaly, with_partials);
        const double g1 = checked_coefficient(jet1.d1);
        next.anomaly_rate = spec.max_speed / std::sqrt(g1);
        if (sens) {
            sens->anomaly += dt * sens->anomaly_rate;
            sens->anomaly_rate = rate_sensitivity(jet1, next.anomaly_rate, sens->anomaly);
        }
    }

    next.anomaly = wrap_angle(next.anomaly);
    return out;
}

}  // namespace

Family family_of(const TrajectoryParams& params) {
    return std::holds_alternative<EllipseParams>(params) ? Family::Ellipse : Family::Fourier;
}

std::string_view to_string(Family family) { return family == Family::Ellipse ? "ellipse" : "fourier"; }

Family family_from_string(std::string_view name) {
    if (name == "ellipse") return Family::Ellipse;
    if (name == "fourier") return Family::Fourier;
    throw ParseError("unknown trajectory family '" + std::string(name) + "'");
}

FourierParams make_fourier(int order_x, int order_y) {
    FourierParams f;
    f.freq_x = 1.0 / kTwoPi;
    f.freq_y = 1.0 / kTwoPi;
    f.x_coeffs = Eigen::VectorXd::Zero(order_x + 1);
    f.y_coeffs = Eigen::VectorXd::Zero(order_y + 1);
    f.x_phases = Eigen::VectorXd::Zero(order_x);
    f.y_phases = Eigen::VectorXd::Zero(order_y);
    return f;
}

Eigen::Index parameter_count(const TrajectoryParams& params) {
    if (const auto* f = std::get_if<FourierParams>(&params)) return 3 + 2 * f->order_x() + 2 * f->order_y();
    return 5;
}

Eigen::VectorXd to_vector(const TrajectoryParams& params) {
    Eigen::VectorXd theta(parameter_count(params));
    if (const auto* e = std::get_if<EllipseParams>(&params)) {
        theta << e->center_x, e->center_y, e->major, e->minor, e->orientation;
        return theta;
    }
    const auto& f = std::get<FourierParams>(params);
    theta << f.freq_x, f.x_coeffs, f.y_coeffs, f.x_phases, f.y_phases;
    return theta;
}

TrajectoryParams from_vector(const TrajectoryParams& shape, const Eigen::Ref<const Eigen::VectorXd>& theta) {
    if (theta.size() != parameter_count(shape)) {
        throw ValidationError("parameter vector has " + std::to_string(theta.size()) + " entries, expected " +
                              std::to_string(parameter_count(shape)));
    }
    if (std::holds_alternative<EllipseParams>(shape)) {
        return EllipseParams{theta(0), theta(1), theta(2), theta(3), theta(4)};
    }
    FourierParams f = std::get<FourierParams>(shape);
    const Eigen::Index gx = f.order_x();
    const Eigen::Index gy = f.order_y();
    f.freq_x = theta(0);
    f.x_coeffs = theta.segment(1, gx + 1);
    f.y_coeffs = theta.segment(2 + gx, gy + 1);
    f.x_phases = theta.segment(3 + gx + gy, gx);
    f.y_phases = theta.segment(3 + 2 * gx + gy, gy);
    return f;
}

std::vector<std::string> parameter_names(const TrajectoryParams& params) {
    if (std::holds_alternative<EllipseParams>(params)) return {"X", "Y", "a", "b", "phi"};
    const auto& f = std::get<FourierParams>(params);
    std::vector<std::string> names{"fx"};
    for (int g = 0; g <= f.order_x(); ++g) names.push_back("a" + std::to_string(g));
    for (int g = 0; g <= f.order_y(); ++g) names.push_back("b" + std::to_string(g));
    for (int g = 1; g <= f.order_x(); ++g) names.push_back("phix" + std::to_string(g));
    for (int g = 1; g <= f.order_y(); ++g) names.push_back("phiy" + std::to_string(g));
    return names;
}

void validate(const TrajectoryParams& params) {
    if (!to_vector(params).allFinite()) throw ValidationError("trajectory parameters must be finite");
    if (const auto* e = std::get_if<EllipseParams>(&params)) {
        if (e->minor < kMinMinorAxis) throw ValidationError("ellipse minor axis must be at least 1e-3");
        if (e->major < e->minor) throw ValidationError("ellipse major axis must not be shorter than the minor axis");
        return;
    }
    const auto& f = std::get<FourierParams>(params);
    if (f.order_x() < 1 || f.order_y() < 1) throw ValidationError("Fourier orders must be at least 1");
    if (f.x_coeffs.size() != f.order_x() + 1 || f.y_coeffs.size() != f.order_y() + 1) {
        throw ValidationError("Fourier amplitude lists must hold one more entry than the phase lists");
    }
    if (!(f.freq_x > 0.0) || !(f.freq_y > 0.0)) throw ValidationError("Fourier base frequencies must be positive");
    if (!std::isfinite(f.freq_y)) throw ValidationError("Fourier base frequencies must be finite");
}

void enforce_feasible(TrajectoryParams& params, const MissionSpace& space) {
    if (auto* e = std::get_if<EllipseParams>(&params)) {
        e->center_x = std::clamp(e->center_x, 0.0, space.width);
        e->center_y = std::clamp(e->center_y, 0.0, space.height);
        e->major = std::max(e->major, kMinMinorAxis);
        e->minor = std::max(e->minor, kMinMinorAxis);
        if (e->major < e->minor) {
            // Same curve with the axes relabelled.
            std::swap(e->major, e->minor);
            e->orientation += 0.5 * std::numbers::pi;
        }
        e->orientation = wrap_angle(e->orientation);
        return;
    }
    auto& f = std::get<FourierParams>(params);
    f.freq_x = std::max(f.freq_x, kMinFourierFrequency);
    f.x_coeffs(0) = std::clamp(f.x_coeffs(0), 0.0, space.width);
    f.y_coeffs(0) = std::clamp(f.y_coeffs(0), 0.0, space.height);
    for (auto& phase : f.x_phases) phase = wrap_angle(phase);
    for (auto& phase : f.y_phases) phase = wrap_angle(phase);
}

ParameterBounds parameter_bounds(const TrajectoryParams& params, const MissionSpace& space) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index n = parameter_count(params);
    ParameterBounds b{Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
    if (std::holds_alternative<EllipseParams>(params)) {
        b.lower.head<4>() << 0.0, 0.0, kMinMinorAxis, kMinMinorAxis;
        b.upper.head<2>() << space.width, space.height;
        return b;
    }
    const auto& f = std::get<FourierParams>(params);
    const Eigen::Index b0 = 2 + f.order_x();
    b.lower(0) = kMinFourierFrequency;
    b.lower(1) = 0.0;
    b.upper(1) = space.width;
    b.lower(b0) = 0.0;
    b.upper(b0) = space.height;
    return b;
}

CurveJet evaluate(const TrajectoryParams& params, double anomaly, bool with_partials) {
    if (const auto* e = std::get_if<EllipseParams>(&params)) return evaluate_ellipse(*e, anomaly, with_partials);
    return evaluate_fourier(std::get<FourierParams>(params), anomaly, with_partials);
}

Vec2 position(const TrajectoryParams& params, double anomaly) { return evaluate(params, anomaly, false).pos; }

Vec2 velocity(const TrajectoryParams& params, double anomaly, double anomaly_rate) {
    return anomaly_rate * evaluate(params, anomaly, false).d1;
}

double speed_coefficient(const TrajectoryParams& params, double anomaly) {
    return evaluate(params, anomaly, false).d1.squaredNorm();
}

double solve_rate_for_speed(const TrajectoryParams& params, double anomaly, double speed) {
    if (speed == 0.0) return 0.0;
    const double g = checked_coefficient(evaluate(params, anomaly, false).d1);
    return speed / std::sqrt(g);
}

AnomalyAccel solve_anomaly_accel(const TrajectoryParams& params, double anomaly, double anomaly_rate,
                                 double max_accel) {
    return accel_from_jet(evaluate(params, anomaly, false), anomaly_rate, max_accel);
}

StepOutcome step(const TrajectoryParams& params, const TrajectoryState& state, double dt, const AgentSpec& spec) {
    return advance(params, state, dt, spec, nullptr);
}

ParamPartials param_partials(const TrajectoryParams& params, double anomaly, double anomaly_rate) {
    const CurveJet jet = evaluate(params, anomaly, true);
    return {jet.pos_partials, anomaly_rate * jet.d1_partials};
}

KinematicSample sample(const TrajectoryParams& params, const TrajectoryState& state) {
    const CurveJet jet = evaluate(params, state.anomaly, true);
    return {jet.pos, state.anomaly_rate * jet.d1, jet.pos_partials, state.anomaly_rate * jet.d1_partials};
}

PathSensitivity path_sensitivity_step(const TrajectoryParams& params, const TrajectoryState& state,
                                      const PathSensitivity& sens, double dt, const AgentSpec& spec) {
    PathSensitivity next = sens;
    if (dt == 0.0) return next;
    advance(params, state, dt, spec, &next);
    return next;
}

StepOutcome step_with_sensitivity(const TrajectoryParams& params, const TrajectoryState& state,
                                  PathSensitivity& sens, double dt, const AgentSpec& spec) {
    return advance(params, state, dt, spec, &sens);
}

KinematicSample total_sample(const TrajectoryParams& params, const TrajectoryState& state,
                             const PathSensitivity& sens) {
    const CurveJet jet = evaluate(params, state.anomaly, true);
    const double rate = state.anomaly_rate;
    KinematicSample out;
    out.position = jet.pos;
    out.velocity = rate * jet.d1;
    out.pos_partials = jet.pos_partials + jet.d1 * sens.anomaly;
    out.vel_partials = rate * jet.d1_partials + jet.d1 * sens.anomaly_rate + (rate * jet.d2) * sens.anomaly;
    return out;
}

}  // namespace pm
