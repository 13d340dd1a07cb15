#include "pm/ipa.hpp"
#include "pm/kinematics.hpp"
#include "pm/sensing.hpp"

#include <doctest.h>

#include <array>

using namespace pm;

namespace {

Event event(EventKind kind, int index) { return Event{kind, 1.0, {index, -1}}; }

}  // namespace

TEST_CASE("assemble") {
    auto g = GradientState::zero(2, 3);
    CHECK(assemble(g, 40.0, -30000, -30000).isZero());

    g.dJ1(0) = 40.0;
    auto grad = assemble(g, 40.0, -30000, -30000);
    CHECK(grad(0) == 1.0);
    CHECK(grad.tail(2).isZero());

    g = GradientState::zero(2, 3);
    g.dJ2(1) = 0.5;
    CHECK(assemble(g, 10.0, -30000, -1)(1) == doctest::Approx(-30000 * 0.5 / 10.0));
}

TEST_CASE("assemble is affine in the penalty weights") {
    auto g = GradientState::zero(1, 3);
    g.dJ1 << 1.0, -2.0, 0.5;
    g.dJ2 << 0.1, 0.0, -0.3;
    g.dJ3 << -0.2, 0.4, 0.0;
    auto a = assemble(g, 20.0, -100.0, -50.0);
    auto b = assemble(g, 20.0, -300.0, -10.0);
    Eigen::VectorXd expected = (-200.0 * g.dJ2 + 40.0 * g.dJ3) / 20.0;
    CHECK((b - a - expected).norm() < 1e-12);
}

TEST_CASE("event resets") {
    auto g = GradientState::zero(4, 3);
    g.dR.row(3) << 0.2, -0.1, 0.7;
    Eigen::RowVectorXd kept = g.dR.row(3);

    apply_event(g, event(EventKind::UncertaintyLeavesZero, 3));
    CHECK(g.dR.row(3) == kept);
    apply_event(g, event(EventKind::MaxSpeedReached, 0));
    CHECK(g.dR.row(3) == kept);
    apply_event(g, event(EventKind::UncertaintyHitsZero, 3));
    CHECK(g.dR.row(3).isZero(0.0));
}

TEST_CASE("propagation") {
    auto g = GradientState::zero(2, 2);
    g.dR.row(0) << 1.0, 1.0;
    Eigen::MatrixXd dP(2, 2);
    dP << 0.5, -0.5, 2.0, 3.0;
    std::vector<bool> pinned{false, true};
    propagate_dR(g, dP, pinned, 15.0, 0.01);
    CHECK(g.dR(0, 0) == doctest::Approx(1.0 - 15.0 * 0.01 * 0.5));
    CHECK(g.dR(0, 1) == doctest::Approx(1.0 + 15.0 * 0.01 * 0.5));
    CHECK(g.dR.row(1).isZero(0.0));

    auto idle = GradientState::zero(1, 2);
    propagate_dR(idle, Eigen::MatrixXd::Zero(1, 2), {false}, 15.0, 0.01);
    CHECK(idle.dR.isZero(0.0));
}

TEST_CASE("accumulate") {
    auto g = GradientState::zero(1, 3);
    g.dR.row(0) << 1.0, 0.0, 0.0;
    Eigen::VectorXd none = Eigen::VectorXd::Zero(3);
    accumulate(g, Eigen::VectorXd::Constant(1, 2.0), none, none, 0.01);
    CHECK(g.dJ1(0) == doctest::Approx(0.02));
    CHECK(g.dJ1.tail(2).isZero());

    auto quiet = GradientState::zero(1, 3);
    accumulate(quiet, Eigen::VectorXd::Constant(1, 2.0), none, none, 0.01);
    CHECK(quiet.dJ1.isZero(0.0));
    CHECK(quiet.dJ2.isZero(0.0));
}

TEST_CASE("one step against the hand chain rule") {
    AgentSpec spec;
    EllipseParams e{1.0, 0.5, 1.5, 0.8, 0.4};
    TrajectoryState st{0.9, 0.7, MotionPhase::Accelerating};
    auto ks = sample(e, st);
    Vec2 target(0.5, 1.2);
    std::array<Vec2, 1> pos{ks.position}, vel{ks.velocity};
    std::array<AgentSpec, 1> specs{spec};
    auto partials = detection_partials(pos, vel, target, specs);
    REQUIRE(partials[0].d_pos.norm() > 0.0);

    std::array<KinematicSample, 1> samples{ks};
    std::array<Eigen::Index, 1> offsets{0};
    Eigen::MatrixXd dP = Eigen::MatrixXd::Zero(1, 5);
    detection_gradient(partials, samples, offsets, dP.row(0));
    Eigen::RowVectorXd hand =
        partials[0].d_pos.transpose() * ks.pos_partials + partials[0].d_vel.transpose() * ks.vel_partials;
    CHECK((dP.row(0) - hand).norm() < 1e-14);

    auto g = GradientState::zero(1, 5);
    propagate_dR(g, dP, {false}, 15.0, 0.01);
    CHECK((g.dR.row(0) + 15.0 * 0.01 * hand).norm() < 1e-14);
}
