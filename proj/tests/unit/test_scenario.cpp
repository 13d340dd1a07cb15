#include "pm/scenario.hpp"

#include <doctest.h>

#include <string>

using namespace pm;

namespace {

const char* kMinimal = R"({
  "space": {"L1": 10, "L2": 5},
  "targets": [{"x": 1, "y": 2, "A": 1}],
  "agents": [{"u_max": 1, "v_max": 1.5, "r_sense": 2, "beta": 5, "rho": 0.2}],
  "horizon": {"T": 20},
  "B": 15
})";

std::string message_of(const Scenario& s) {
    try {
        validate(s);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal document fills in defaults") {
    auto s = load_scenario(kMinimal);
    CHECK(s.targets.size() == 1);
    CHECK(s.targets[0].weight == 1.0);
    CHECK(s.targets[0].initial_uncertainty == 0.0);
    CHECK(s.obstacles.empty());
    CHECK(s.time_step == 0.01);
    CHECK(s.penalties.agent_penalty == -30000.0);
    CHECK(s.penalties.margin == 0.02);
    CHECK(s.step_count() == 2000);
}

TEST_CASE("unknown and malformed documents are parse errors") {
    std::string doc = kMinimal;
    auto with_extra = doc.substr(0, doc.rfind('}')) + ", \"extra\": 1}";
    CHECK_THROWS_AS(load_scenario(with_extra), ParseError);
    CHECK_THROWS_AS(load_scenario("{not json"), ParseError);
    CHECK_THROWS_AS(load_scenario(R"({"space": {"L1": 1, "L2": 1}})"), ParseError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ParseError);
}

TEST_CASE("validation names the violated invariant") {
    auto base = load_scenario(kMinimal);

    auto s = base;
    s.decay_rate = 1.0;
    CHECK(message_of(s) == "B must exceed all A_i");

    s = base;
    s.agents[0].speed_threshold = 1.0;
    CHECK(message_of(s) == "β_n must exceed v_max");

    s = base;
    s.agents.clear();
    CHECK(message_of(s) == "at least one agent is required");

    s = base;
    s.time_step = 0.5;
    CHECK(message_of(s) == "T/dt must be at least 100");

    s = base;
    s.penalties.agent_penalty = 1.0;
    CHECK(message_of(s) == "M2 must be negative");

    s = base;
    s.space.width = 0.0;
    CHECK(message_of(s) == "mission space L1 and L2 must be positive");

    s = base;
    s.targets.clear();
    CHECK(message_of(s).empty());
}

TEST_CASE("dump and load round trip") {
    for (const auto& s : {builtin_case_a(), builtin_case_b()}) {
        auto back = load_scenario(dump_scenario(s));
        CHECK(dump_scenario(back) == dump_scenario(s));
        REQUIRE(back.targets.size() == s.targets.size());
        CHECK(back.horizon == s.horizon);
        CHECK(back.obstacles.size() == s.obstacles.size());
    }
}

TEST_CASE("built-in case A") {
    auto s = builtin_case_a();
    validate(s);
    CHECK(s.targets.size() == 66);
    CHECK(s.agents.size() == 1);
    CHECK(s.horizon == 40.0);
    CHECK(s.decay_rate == 15.0);
    REQUIRE(s.obstacles.size() == 2);
    CHECK(s.obstacles[0].center == Vec2(3.0, 3.0));
    CHECK(s.obstacles[1].center == Vec2(9.0, 2.5));
}

TEST_CASE("built-in case B weights the x = 5 column") {
    auto s = builtin_case_b();
    validate(s);
    CHECK(s.agents.size() == 2);
    CHECK(s.horizon == 30.0);
    int heavy = 0;
    for (const auto& t : s.targets)
        if (t.weight == 2.0) {
            ++heavy;
            CHECK(t.position.x() == 5.0);
        }
    CHECK(heavy == 4);
    CHECK(s.targets[31].weight == 2.0);  // (5, 1)
    CHECK(s.targets[30].weight == 1.0);  // (5, 0)
}

TEST_CASE("builtin lookup") {
    CHECK(builtin_scenario("case-a").has_value());
    CHECK(builtin_scenario("case-b").has_value());
    CHECK_FALSE(builtin_scenario("case-c").has_value());
}
