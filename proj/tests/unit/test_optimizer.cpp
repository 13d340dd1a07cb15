#include "pm/optimizer.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace pm;

namespace {

OptOptions quick(int iters) {
    OptOptions o;
    o.max_iters = iters;
    o.epsilon = 1e-3;
    return o;
}

}  // namespace

TEST_CASE("zero gradient start stops after one unchanged iterate") {
    auto s = pmtest::two_targets(1);
    s.space = {30, 30};
    s.targets = {{Vec2(28, 28), 1.0, 1.0, 0.0}};
    std::vector<TrajectoryParams> init{EllipseParams{5, 5, 2, 1, 0.5}};
    auto r = optimize(s, {init}, quick(50));
    REQUIRE(r.starts.size() == 1);
    CHECK(r.starts[0].termination == Termination::ZeroGradient);
    CHECK(r.starts[0].iterations == 1);
    CHECK(to_vector(r.best_params[0]) == to_vector(init[0]));
    REQUIRE(r.iterates.size() == 2);
    CHECK(r.iterates[1].J == r.iterates[0].J);
}

TEST_CASE("armijo iterates decrease strictly and stay feasible") {
    auto s = pmtest::two_agents_one_obstacle();
    auto inits = random_initializations(s, Family::Ellipse, 2, 3);
    inits.push_back(pmtest::two_ellipses());
    auto o = quick(15);
    o.starts = 3;
    auto r = optimize(s, inits, o);
    for (const auto& start : r.starts) {
        CHECK(start.termination != Termination::Failed);
        for (const auto& p : start.params) {
            auto e = std::get<EllipseParams>(p);
            CHECK(e.orientation >= 0.0);
            CHECK(e.orientation < 2 * std::numbers::pi);
            CHECK(e.minor >= kMinMinorAxis);
            CHECK(e.major >= e.minor);
            CHECK(s.space.contains(Vec2(e.center_x, e.center_y)));
        }
    }
    for (std::size_t k = 1; k < r.iterates.size(); ++k)
        if (r.iterates[k].start == r.iterates[k - 1].start) CHECK(r.iterates[k].J < r.iterates[k - 1].J);

    // best J is the winning start's recorded value
    CHECK(r.best_J == r.starts[r.start_index].J);
    CHECK(r.final_run.J == r.best_J);
}

TEST_CASE("fixed step and termination on epsilon") {
    auto s = pmtest::two_targets(1);
    auto o = quick(200);
    o.step_rule = FixedStep{1e-3};
    o.epsilon = 0.05;
    auto r = optimize(s, {pmtest::single_ellipse()}, o);
    const auto& it = r.iterates;
    REQUIRE(it.size() >= 2);
    if (r.starts[0].termination == Termination::Converged)
        CHECK(std::abs(it.back().J - it[it.size() - 2].J) < o.epsilon);
    else
        CHECK(r.starts[0].iterations == o.max_iters);
}

TEST_CASE("optimization is deterministic") {
    auto s = pmtest::two_targets(1);
    auto inits = random_initializations(s, Family::Ellipse, 2, 42);
    auto o = quick(8);
    o.grad_mode = GradMode::Total;
    auto a = optimize(s, inits, o);
    auto b = optimize(s, inits, o);
    std::ostringstream ca, cb;
    write_convergence_csv(ca, a.iterates);
    write_convergence_csv(cb, b.iterates);
    CHECK(ca.str() == cb.str());
    CHECK(ca.str().rfind("start,h,J,J1,J2,J3,alpha,grad_norm\n", 0) == 0);
    CHECK(stack_parameters(a.best_params) == stack_parameters(b.best_params));
}

TEST_CASE("random initializations") {
    auto s = builtin_case_b();
    auto a = random_initializations(s, Family::Ellipse, 5, 7);
    auto b = random_initializations(s, Family::Ellipse, 5, 7);
    REQUIRE(a.size() == 5);
    std::set<std::vector<double>> distinct;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(stack_parameters(a[k]) == stack_parameters(b[k]));
        REQUIRE(a[k].size() == 2);
        auto v = stack_parameters(a[k]);
        distinct.insert(std::vector<double>(v.begin(), v.end()));
        for (const auto& p : a[k]) {
            auto e = std::get<EllipseParams>(p);
            CHECK(e.major >= e.minor);
            CHECK(e.minor >= 0.5);
            CHECK(e.major <= 2.5);
            CHECK(s.space.contains(Vec2(e.center_x, e.center_y)));
        }
    }
    CHECK(distinct.size() == 5);
    CHECK(stack_parameters(random_initializations(s, Family::Ellipse, 1, 8)[0]) != stack_parameters(a[0]));

    auto f = random_initializations(s, Family::Fourier, 3, 7);
    for (const auto& set : f)
        for (const auto& p : set) {
            auto q = std::get<FourierParams>(p);
            CHECK(parameter_count(q) == 11);
            CHECK(q.freq_x == doctest::Approx(1.0 / (2 * std::numbers::pi)));
            CHECK(q.freq_y == q.freq_x);
            for (int g = 1; g <= 2; ++g) {
                CHECK(q.x_coeffs(g) >= 0.2);
                CHECK(q.x_coeffs(g) <= 2.0);
            }
        }
}

TEST_CASE("option validation") {
    OptOptions o;
    CHECK_NOTHROW(validate(o));
    o.epsilon = 0.0;
    CHECK_THROWS(validate(o));
    o = {};
    o.step_rule = ArmijoStep{.shrink = 1.0};
    CHECK_THROWS(validate(o));
    o = {};
    o.starts = 0;
    CHECK_THROWS(validate(o));
}

TEST_CASE("all starts failing") {
    auto s = pmtest::two_targets(1);
    std::vector<TrajectoryParams> flat{make_fourier(2, 2)};
    CHECK_THROWS_AS(optimize(s, {flat}, quick(5)), AllStartsFailedError);
}
