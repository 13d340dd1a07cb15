#include "pm/params_io.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace pm;

TEST_CASE("ellipse document") {
    auto p = load_params(R"({"family":"ellipse","agents":[{"X":3,"Y":2,"a":2,"b":1,"phi":0.5}]})");
    REQUIRE(p.size() == 1);
    auto e = std::get<EllipseParams>(p[0]);
    CHECK(e.center_x == 3.0);
    CHECK(e.orientation == 0.5);
    CHECK(to_vector(load_params(dump_params(p))[0]) == to_vector(p[0]));
}

TEST_CASE("fourier round trip keeps f_y and orders") {
    std::mt19937_64 rng(4);
    std::vector<TrajectoryParams> p{pmtest::random_fourier(rng), pmtest::random_fourier(rng, 3)};
    auto back = load_params(dump_params(p));
    REQUIRE(back.size() == 2);
    for (int n = 0; n < 2; ++n) {
        const auto& a = std::get<FourierParams>(p[n]);
        const auto& b = std::get<FourierParams>(back[n]);
        CHECK(a.freq_y == b.freq_y);
        CHECK(a.order_x() == b.order_x());
        CHECK(to_vector(a) == to_vector(b));
    }
    CHECK(parameter_count(back[0]) == 11);
}

TEST_CASE("rejected documents") {
    CHECK_THROWS_AS(load_params(R"({"family":"ellipse","agents":[{"X":3,"Y":2,"a":2,"b":1}]})"), ParseError);
    CHECK_THROWS_AS(load_params(R"({"family":"spline","agents":[]})"), ParseError);
    CHECK_THROWS_AS(load_params(R"({"family":"ellipse","agents":[{"X":3,"Y":2,"a":2,"b":1,"phi":0,"z":1}]})"),
                    ParseError);
    CHECK_THROWS_AS(load_params("[1,2"), ParseError);
    CHECK_THROWS_AS(load_params_file("/nonexistent/params.json"), ParseError);
    CHECK_THROWS(load_params(R"({"family":"ellipse","agents":[{"X":3,"Y":2,"a":1,"b":2,"phi":0}]})"));

    std::vector<TrajectoryParams> mixed{EllipseParams{}, make_fourier(1, 1)};
    CHECK_THROWS_AS(dump_params(mixed), std::invalid_argument);
}
