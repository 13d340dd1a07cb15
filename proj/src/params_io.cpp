#include "pm/params_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pm {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const char* where) {
    if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ParseError(std::string(where) + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw ParseError(std::string("params: '") + key + "' must be a number");
    return it->get<double>();
}

Eigen::VectorXd numbers(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) throw ParseError(std::string("params: '") + key + "' must be an array");
    Eigen::VectorXd v(it->size());
    for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_number()) throw ParseError(std::string("params: '") + key + "' must hold numbers");
        v[static_cast<Eigen::Index>(k)] = (*it)[k].get<double>();
    }
    return v;
}

json to_json_array(const Eigen::VectorXd& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

std::vector<TrajectoryParams> load_params(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed params document: ") + e.what());
    }
    check_keys(doc, {"family", "agents"}, "params");
    if (!doc.contains("family") || !doc["family"].is_string()) throw ParseError("params: missing 'family'");
    if (!doc.contains("agents") || !doc["agents"].is_array()) throw ParseError("params: missing 'agents'");
    Family family;
    try {
        family = family_from_string(doc["family"].get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError(std::string("params: ") + e.what());
    }

    std::vector<TrajectoryParams> out;
    for (const auto& a : doc["agents"]) {
        if (family == Family::Ellipse) {
            check_keys(a, {"X", "Y", "a", "b", "phi"}, "ellipse agent");
            out.emplace_back(EllipseParams{number(a, "X"), number(a, "Y"), number(a, "a"), number(a, "b"),
                                           number(a, "phi")});
        } else {
            check_keys(a, {"fx", "fy", "a", "b", "phix", "phiy"}, "fourier agent");
            FourierParams f;
            f.freq_x = number(a, "fx");
            f.freq_y = number(a, "fy");
            f.x_coeffs = numbers(a, "a");
            f.y_coeffs = numbers(a, "b");
            f.x_phases = numbers(a, "phix");
            f.y_phases = numbers(a, "phiy");
            out.emplace_back(std::move(f));
        }
        validate(out.back());
    }
    return out;
}

std::vector<TrajectoryParams> load_params_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open params file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load_params(buf.str());
}

std::string dump_params(const std::vector<TrajectoryParams>& params) {
    json doc;
    const Family family = params.empty() ? Family::Ellipse : family_of(params.front());
    doc["family"] = std::string(to_string(family));
    doc["agents"] = json::array();
    for (const auto& p : params) {
        if (family_of(p) != family) throw std::invalid_argument("agents mix trajectory families");
        if (const auto* e = std::get_if<EllipseParams>(&p)) {
            doc["agents"].push_back(
                {{"X", e->center_x}, {"Y", e->center_y}, {"a", e->major}, {"b", e->minor}, {"phi", e->orientation}});
        } else {
            const auto& f = std::get<FourierParams>(p);
            doc["agents"].push_back({{"fx", f.freq_x},
                                     {"fy", f.freq_y},
                                     {"a", to_json_array(f.x_coeffs)},
                                     {"b", to_json_array(f.y_coeffs)},
                                     {"phix", to_json_array(f.x_phases)},
                                     {"phiy", to_json_array(f.y_phases)}});
        }
    }
    return doc.dump(2);
}

}  // namespace pm
