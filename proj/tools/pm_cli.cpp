// pm: simulate / optimize / grad-check / sweep front end.

#include "pm/optimizer.hpp"
#include "pm/params_io.hpp"
#include "pm/simulator.hpp"
#include "pm/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kLoadError = 2, kKinematicsError = 3, kAllStartsFailed = 4, kCheckFailed = 5 };

struct Common {
    std::string scenario;
    std::string out = ".";
    double dt = 0.0;
    std::string sensing = "velocity";
};

struct OptimizeFlags {
    std::string family = "ellipse";
    int starts = 8;
    std::uint64_t seed = 0;
    double epsilon = 0.01;
    int max_iters = 500;
    std::string grad_mode = "paper";
    std::string step = "armijo";
    double alpha = 0.05;
    double shrink = 0.5;
    double armijo_c = 1e-4;
    int max_backtracks = 40;
    double max_step = 0.0;
    int fourier_order = 2;
    std::string init;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

pm::Scenario load_any_scenario(const Common& c) {
    if (c.scenario.empty()) throw pm::ParseError("--scenario is required");
    auto builtin = pm::builtin_scenario(c.scenario);
    pm::Scenario s = builtin ? *builtin : pm::load_scenario_file(c.scenario);
    if (c.dt > 0.0) {
        s.time_step = c.dt;
        pm::validate(s);
    }
    return s;
}

json diagnostics_json(const pm::Diagnostics& d) {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"min_pair_distance", finite_or_null(d.min_pair_distance)},
            {"min_obstacle_distance", finite_or_null(d.min_obstacle_distance)},
            {"cruise_accel_violations", d.cruise_accel_violations},
            {"feasibility_warnings", d.feasibility_warnings},
            {"coincident_points", d.coincident_points},
            {"max_speed", d.max_speed},
            {"gradient_excited", d.gradient_excited}};
}

json summary_json(const pm::SimResult& r) {
    json grad = json::array();
    for (double g : r.grad) grad.push_back(g);
    return {{"J", r.J},
            {"J1", r.J1},
            {"J2", r.J2},
            {"J3", r.J3},
            {"M2", r.agent_penalty},
            {"M3", r.obstacle_penalty},
            {"grad_mode", std::string(pm::to_string(r.grad_mode))},
            {"grad", grad},
            {"events", r.events.size()},
            {"diagnostics", diagnostics_json(r.diagnostics)}};
}

void write_run(const pm::SimResult& r, const pm::Scenario& s, const fs::path& out) {
    pm::export_traces(r, s, out);
    write_text(out / "summary.json", summary_json(r).dump(2) + "\n");
}

pm::OptOptions opt_options(const OptimizeFlags& f, pm::SensingModel sensing) {
    pm::OptOptions o;
    o.epsilon = f.epsilon;
    o.max_iters = f.max_iters;
    o.starts = f.starts;
    o.seed = f.seed;
    o.grad_mode = pm::grad_mode_from_string(f.grad_mode);
    o.sensing = sensing;
    if (f.step == "fixed") {
        o.step_rule = pm::FixedStep{f.alpha};
    } else if (f.step == "armijo") {
        o.step_rule = pm::ArmijoStep{f.alpha, f.max_step, f.shrink, f.armijo_c, f.max_backtracks};
    } else {
        throw pm::ValidationError("unknown step rule '" + f.step + "'");
    }
    pm::validate(o);
    return o;
}

std::vector<std::vector<pm::TrajectoryParams>> load_inits(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pm::ParseError("cannot open init file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw pm::ParseError(std::string("malformed init file: ") + e.what());
    }
    std::vector<std::vector<pm::TrajectoryParams>> inits;
    if (doc.is_array()) {
        for (const auto& d : doc) inits.push_back(pm::load_params(d.dump()));
    } else {
        inits.push_back(pm::load_params(doc.dump()));
    }
    return inits;
}

pm::OptResult run_optimize(const pm::Scenario& s, const OptimizeFlags& f, pm::SensingModel sensing,
                           const fs::path& out) {
    const pm::OptOptions o = opt_options(f, sensing);
    auto inits = f.init.empty() ? pm::random_initializations(s, pm::family_from_string(f.family), f.starts, f.seed,
                                                             f.fourier_order)
                                : load_inits(f.init);
    for (const auto& set : inits) {
        if (set.size() != s.agents.size())
            throw pm::ValidationError("initialization has " + std::to_string(set.size()) + " agents, scenario has " +
                                      std::to_string(s.agents.size()));
    }
    spdlog::info("optimizing {} start(s), {} family, {} gradients", inits.size(), f.family, f.grad_mode);
    pm::OptResult r = pm::optimize(s, inits, o);
    for (const auto& st : r.starts) {
        if (st.termination == pm::Termination::ZeroGradient)
            spdlog::warn("start {}: gradient vanished, no target sensed", st.index);
        else if (st.termination == pm::Termination::Failed)
            spdlog::warn("start {} failed: {}", st.index, st.error);
        else
            spdlog::debug("start {}: {} after {} iterations, J = {}", st.index, pm::to_string(st.termination),
                          st.iterations, st.J);
    }
    spdlog::info("best start {}: J = {}", r.start_index, r.best_J);

    fs::create_directories(out);
    {
        std::ofstream csv(out / "convergence.csv");
        pm::write_convergence_csv(csv, r.iterates);
    }
    write_text(out / "best_params.json", pm::dump_params(r.best_params) + "\n");
    write_run(r.final_run, s, out);
    json starts = json::array();
    for (const auto& st : r.starts) {
        starts.push_back({{"index", st.index},
                          {"termination", std::string(pm::to_string(st.termination))},
                          {"iterations", st.iterations},
                          {"J", st.params.empty() ? json(nullptr) : json(st.J)},
                          {"collision_free", st.collision_free},
                          {"error", st.error}});
    }
    json summary = summary_json(r.final_run);
    summary["best_start"] = r.start_index;
    summary["starts"] = starts;
    write_text(out / "summary.json", summary.dump(2) + "\n");
    return r;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("pm");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("PM_LOG_LEVEL")) {
        const std::string l = level;
        if (l == "error") spdlog::set_level(spdlog::level::err);
        else if (l == "warn") spdlog::set_level(spdlog::level::warn);
        else if (l == "info") spdlog::set_level(spdlog::level::info);
        else if (l == "debug") spdlog::set_level(spdlog::level::debug);
        else spdlog::warn("ignoring PM_LOG_LEVEL={}", l);
    }
}

// --out may be needed before CLI11 has parsed anything (for the manifest).
std::string scan_out(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--out") return argv[i + 1];
    }
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("--out=", 0) == 0) return a.substr(6);
    }
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Persistent monitoring trajectory simulation and optimization"};
    app.require_subcommand(1);

    Common common;
    OptimizeFlags of;
    std::string params_path;
    std::string grad_mode = "paper";
    long trace_stride = 1;
    std::string check_mode = "paper";
    double fd_h = 1e-5;
    double tolerance = 1e-3;
    double floor = 1e-12;
    std::string sweep_family = "ellipse";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", common.scenario, "scenario file, case-a or case-b")->required();
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--dt", common.dt, "override the scenario time step");
    };
    auto add_optimize = [&](CLI::App* sub) {
        sub->add_option("--starts", of.starts, "random initializations");
        sub->add_option("--seed", of.seed, "initialization seed");
        sub->add_option("--epsilon", of.epsilon, "stop when |J(h) - J(h-1)| < epsilon");
        sub->add_option("--max-iters", of.max_iters, "iterations per start");
        sub->add_option("--grad-mode", of.grad_mode, "paper or total")->check(CLI::IsMember({"paper", "total"}));
        sub->add_option("--step", of.step, "armijo or fixed")->check(CLI::IsMember({"armijo", "fixed"}));
        sub->add_option("--alpha", of.alpha, "fixed step size or first Armijo trial");
        sub->add_option("--shrink", of.shrink, "Armijo backtracking factor");
        sub->add_option("--armijo-c", of.armijo_c, "Armijo sufficient-decrease constant");
        sub->add_option("--max-backtracks", of.max_backtracks, "Armijo backtracking limit");
        sub->add_option("--max-step", of.max_step, "cap on the first trial step length (0 = none)");
        sub->add_option("--fourier-order", of.fourier_order, "harmonics per coordinate for Fourier draws");
    };

    auto* sim = app.add_subcommand("simulate", "run one forward pass");
    add_common(sim);
    sim->add_option("--params", params_path, "trajectory parameter file")->required();
    sim->add_option("--grad-mode", grad_mode, "none, paper or total")
        ->check(CLI::IsMember({"none", "paper", "total"}));
    sim->add_option("--sensing", common.sensing, "velocity or distance-only");
    sim->add_option("--trace-stride", trace_stride, "record every n-th step");

    auto* opt = app.add_subcommand("optimize", "gradient descent over trajectory parameters");
    add_common(opt);
    add_optimize(opt);
    opt->add_option("--family", of.family, "ellipse or fourier")->check(CLI::IsMember({"ellipse", "fourier"}));
    opt->add_option("--init", of.init, "explicit initialization(s) instead of random draws");
    opt->add_option("--sensing", common.sensing, "velocity or distance-only");

    auto* gc = app.add_subcommand("grad-check", "compare IPA gradients with finite differences");
    gc->set_help_flag("--help", "print this help message and exit");
    add_common(gc);
    gc->add_option("--params", params_path, "trajectory parameter file")->required();
    gc->add_option("--mode", check_mode, "paper or total")->check(CLI::IsMember({"paper", "total"}));
    gc->add_option("--h", fd_h, "finite-difference step");
    gc->add_option("--tolerance", tolerance, "maximum relative error");
    gc->add_option("--floor", floor, "activity floor on |numeric|");
    gc->add_option("--sensing", common.sensing, "velocity or distance-only");

    auto* sw = app.add_subcommand("sweep", "optimize over family x sensing configurations");
    add_common(sw);
    add_optimize(sw);
    sw->add_option("--family", sweep_family, "comma separated families");
    sw->add_option("--sensing", common.sensing, "comma separated sensing models");

    json manifest;
    manifest["argv"] = std::vector<std::string>(argv, argv + argc);
    fs::path out_dir = scan_out(argc, argv);

    int code = kOk;
    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            throw pm::ParseError("command line: " + std::string(e.what()));
        }
        out_dir = common.out;
        fs::create_directories(out_dir);
        manifest["scenario"] = common.scenario;
        manifest["output"] = out_dir.string();

        if (*sim) {
            manifest["command"] = "simulate";
            manifest["options"] = {{"params", params_path}, {"grad_mode", grad_mode}, {"dt", common.dt},
                                   {"sensing", common.sensing}, {"trace_stride", trace_stride}};
            const pm::Scenario s = load_any_scenario(common);
            const auto params = pm::load_params_file(params_path);
            manifest["family"] = params.empty() ? "" : std::string(pm::to_string(pm::family_of(params[0])));
            pm::SimOptions o;
            o.grad_mode = pm::grad_mode_from_string(grad_mode);
            o.sensing = pm::sensing_model_from_string(common.sensing);
            o.trace_stride = trace_stride;
            const pm::SimResult r = pm::simulate(s, params, o);
            write_run(r, s, out_dir);
            spdlog::info("J = {} (J1 = {}, J2 = {}, J3 = {})", r.J, r.J1, r.J2, r.J3);
        } else if (*opt) {
            manifest["command"] = "optimize";
            manifest["family"] = of.family;
            manifest["options"] = {{"starts", of.starts}, {"seed", of.seed}, {"epsilon", of.epsilon},
                                   {"max_iters", of.max_iters}, {"grad_mode", of.grad_mode}, {"step", of.step},
                                   {"alpha", of.alpha}, {"max_step", of.max_step}, {"sensing", common.sensing},
                                   {"init", of.init}, {"dt", common.dt}};
            const pm::Scenario s = load_any_scenario(common);
            run_optimize(s, of, pm::sensing_model_from_string(common.sensing), out_dir);
        } else if (*gc) {
            manifest["command"] = "grad-check";
            manifest["options"] = {{"params", params_path}, {"mode", check_mode}, {"h", fd_h},
                                   {"tolerance", tolerance}, {"floor", floor}, {"sensing", common.sensing}};
            const pm::Scenario s = load_any_scenario(common);
            const auto params = pm::load_params_file(params_path);
            manifest["family"] = params.empty() ? "" : std::string(pm::to_string(pm::family_of(params[0])));
            pm::CheckOptions co;
            co.h = fd_h;
            co.activity_floor = floor;
            co.sensing = pm::sensing_model_from_string(common.sensing);
            const auto report = pm::check(s, params, pm::grad_mode_from_string(check_mode), tolerance, co);
            write_text(out_dir / "gradcheck.json", report.to_json() + "\n");
            for (const auto& c : report.components) {
                if (c.excluded) spdlog::info("{} excluded: probes straddle an event", c.name);
            }
            spdlog::info("max relative error {} (tolerance {})", report.max_rel_error, tolerance);
            if (!report.pass) code = kCheckFailed;
        } else if (*sw) {
            manifest["command"] = "sweep";
            manifest["family"] = sweep_family;
            manifest["options"] = {{"starts", of.starts}, {"seed", of.seed}, {"epsilon", of.epsilon},
                                   {"max_iters", of.max_iters}, {"grad_mode", of.grad_mode}, {"step", of.step},
                                   {"alpha", of.alpha}, {"sensing", common.sensing}, {"dt", common.dt}};
            const auto families = split(sweep_family);
            const auto models = split(common.sensing);
            if (families.empty() || models.empty()) throw pm::ValidationError("sweep axis is empty");
            for (const auto& f : families) pm::family_from_string(f);
            for (const auto& m : models) pm::sensing_model_from_string(m);
            const pm::Scenario s = load_any_scenario(common);

            std::ostringstream table;
            table << "configuration,J,J2,J3\n";
            int failed = 0;
            for (const auto& f : families) {
                for (const auto& m : models) {
                    const std::string name = f + "-" + m;
                    OptimizeFlags flags = of;
                    flags.family = f;
                    try {
                        const auto r = run_optimize(s, flags, pm::sensing_model_from_string(m), out_dir / name);
                        char row[256];
                        std::snprintf(row, sizeof row, "%s,%.9g,%.9g,%.9g\n", name.c_str(), r.final_run.J,
                                      r.final_run.J2, r.final_run.J3);
                        table << row;
                    } catch (const pm::AllStartsFailedError& e) {
                        spdlog::error("{}: {}", name, e.what());
                        table << name << ",,,\n";
                        ++failed;
                    }
                }
            }
            write_text(out_dir / "comparison.csv", table.str());
            if (failed == static_cast<int>(families.size() * models.size()))
                throw pm::AllStartsFailedError("every sweep configuration failed");
        }
    } catch (const pm::AllStartsFailedError& e) {
        spdlog::error("{}", e.what());
        code = kAllStartsFailed;
    } catch (const pm::DegenerateGeometryError& e) {
        spdlog::error("kinematics error: {}", e.what());
        code = kKinematicsError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        code = kLoadError;
    }

    manifest["exit_status"] = code;
    try {
        fs::create_directories(out_dir);
        write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        spdlog::error("cannot write manifest: {}", e.what());
    }
    return code;
}
