#include "pm/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pm {

using nlohmann::json;

long Scenario::step_count() const { return std::lround(horizon / time_step); }

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ParseError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
    return it->get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

const json& array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'");
    if (!it->is_array()) throw ParseError(std::string(key) + ": expected an array");
    return *it;
}

}  // namespace

void validate(const Scenario& s) {
    require(s.space.width > 0.0 && s.space.height > 0.0, "mission space L1 and L2 must be positive");
    require(!s.agents.empty(), "at least one agent is required");
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const auto& t = s.targets[i];
        auto tag = "target " + std::to_string(i) + ": ";
        require(t.weight > 0.0, tag + "sigma must be positive");
        require(t.growth_rate > 0.0, tag + "A_i must be positive");
        require(t.initial_uncertainty >= 0.0, tag + "R_i(0) must be non-negative");
        require(t.position.allFinite(), tag + "position must be finite");
    }
    for (const auto& t : s.targets) require(s.decay_rate > t.growth_rate, "B must exceed all A_i");
    for (std::size_t l = 0; l < s.obstacles.size(); ++l)
        require(s.obstacles[l].radius > 0.0, "obstacle " + std::to_string(l) + ": radius must be positive");
    for (std::size_t n = 0; n < s.agents.size(); ++n) {
        const auto& a = s.agents[n];
        auto tag = "agent " + std::to_string(n) + ": ";
        require(a.max_accel > 0.0, tag + "u_max must be positive");
        require(a.max_speed > 0.0, tag + "v_max must be positive");
        require(a.speed_threshold > a.max_speed, "β_n must exceed v_max");
        require(a.sensing_range > 0.0, tag + "sensing range must be positive");
        require(a.safety_radius > 0.0, tag + "rho must be positive");
    }
    require(s.penalties.agent_penalty < 0.0, "M2 must be negative");
    require(s.penalties.obstacle_penalty < 0.0, "M3 must be negative");
    require(s.penalties.margin >= 0.0, "safety margin must be non-negative");
    require(s.horizon > 0.0, "T must be positive");
    require(s.time_step > 0.0, "dt must be positive");
    require(s.horizon / s.time_step >= 100.0 - 1e-9, "T/dt must be at least 100");
}

Scenario load_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed scenario document: ") + e.what());
    }
    check_keys(doc, {"space", "targets", "obstacles", "agents", "penalties", "horizon", "B"}, "scenario");

    Scenario s;
    if (!doc.contains("space")) throw ParseError("missing key 'space'");
    const auto& space = doc["space"];
    check_keys(space, {"L1", "L2"}, "space");
    s.space = {number(space, "L1", "space"), number(space, "L2", "space")};

    for (const auto& t : array(doc, "targets")) {
        check_keys(t, {"x", "y", "sigma", "A", "R0"}, "target");
        s.targets.push_back({Vec2(number(t, "x", "target"), number(t, "y", "target")),
                             number_or(t, "sigma", 1.0, "target"), number(t, "A", "target"),
                             number_or(t, "R0", 0.0, "target")});
    }
    if (doc.contains("obstacles")) {
        for (const auto& o : array(doc, "obstacles")) {
            check_keys(o, {"x", "y", "r"}, "obstacle");
            s.obstacles.push_back({Vec2(number(o, "x", "obstacle"), number(o, "y", "obstacle")),
                                   number(o, "r", "obstacle")});
        }
    }
    for (const auto& a : array(doc, "agents")) {
        check_keys(a, {"u_max", "v_max", "r_sense", "beta", "rho"}, "agent");
        s.agents.push_back({number(a, "u_max", "agent"), number(a, "v_max", "agent"), number(a, "r_sense", "agent"),
                            number(a, "beta", "agent"), number(a, "rho", "agent")});
    }
    if (doc.contains("penalties")) {
        const auto& p = doc["penalties"];
        check_keys(p, {"M2", "M3", "margin"}, "penalties");
        s.penalties.agent_penalty = number_or(p, "M2", s.penalties.agent_penalty, "penalties");
        s.penalties.obstacle_penalty = number_or(p, "M3", s.penalties.obstacle_penalty, "penalties");
        s.penalties.margin = number_or(p, "margin", s.penalties.margin, "penalties");
    }
    if (!doc.contains("horizon")) throw ParseError("missing key 'horizon'");
    const auto& h = doc["horizon"];
    check_keys(h, {"T", "dt"}, "horizon");
    s.horizon = number(h, "T", "horizon");
    s.time_step = number_or(h, "dt", 0.01, "horizon");
    s.decay_rate = number(doc, "B", "scenario");

    validate(s);
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    json doc;
    doc["space"] = {{"L1", s.space.width}, {"L2", s.space.height}};
    doc["targets"] = json::array();
    for (const auto& t : s.targets)
        doc["targets"].push_back({{"x", t.position.x()},
                                  {"y", t.position.y()},
                                  {"sigma", t.weight},
                                  {"A", t.growth_rate},
                                  {"R0", t.initial_uncertainty}});
    doc["obstacles"] = json::array();
    for (const auto& o : s.obstacles)
        doc["obstacles"].push_back({{"x", o.center.x()}, {"y", o.center.y()}, {"r", o.radius}});
    doc["agents"] = json::array();
    for (const auto& a : s.agents)
        doc["agents"].push_back({{"u_max", a.max_accel},
                                 {"v_max", a.max_speed},
                                 {"r_sense", a.sensing_range},
                                 {"beta", a.speed_threshold},
                                 {"rho", a.safety_radius}});
    doc["penalties"] = {{"M2", s.penalties.agent_penalty},
                        {"M3", s.penalties.obstacle_penalty},
                        {"margin", s.penalties.margin}};
    doc["horizon"] = {{"T", s.horizon}, {"dt", s.time_step}};
    doc["B"] = s.decay_rate;
    return doc.dump(2);
}

namespace {

Scenario grid_scenario(double horizon, std::size_t agents) {
    Scenario s;
    s.space = {10.0, 5.0};
    for (int x = 0; x <= 10; ++x)
        for (int y = 0; y <= 5; ++y) s.targets.push_back({Vec2(x, y), 1.0, 1.0, 0.0});
    s.agents.assign(agents, AgentSpec{1.0, 1.5, 2.0, 5.0, 0.2});
    s.penalties = {-30000.0, -30000.0, 0.02};
    s.horizon = horizon;
    s.decay_rate = 15.0;
    s.time_step = 0.01;
    return s;
}

}  // namespace

Scenario builtin_case_a() {
    auto s = grid_scenario(40.0, 1);
    s.obstacles = {{Vec2(3.0, 3.0), 1.0}, {Vec2(9.0, 2.5), 1.0}};
    return s;
}

Scenario builtin_case_b() {
    auto s = grid_scenario(30.0, 2);
    for (auto& t : s.targets)
        if (t.position.x() == 5.0 && t.position.y() >= 1.0 && t.position.y() <= 4.0) t.weight = 2.0;
    s.obstacles = {{Vec2(3.0, 3.8), 1.0}, {Vec2(8.5, 1.5), 1.0}};
    return s;
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
    if (name == "case-a") return builtin_case_a();
    if (name == "case-b") return builtin_case_b();
    return std::nullopt;
}

}  // namespace pm
