// Drives the pm executable end to end: exit codes, artifact layout, and
// self-consistency of the written files.
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string pm_exe;
fs::path work;
int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "ok    " : "FAIL  ") << what << '\n';
    if (!ok) ++failures;
}

int run(const std::string& args) {
    std::string cmd = "cd '" + work.string() + "' && '" + pm_exe + "' " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int manifest_status(const std::string& dir) {
    auto p = work / dir / "manifest.json";
    if (!fs::exists(p)) return -1;
    return read_json(p)["exit_status"].get<int>();
}

const char* kSmallScenario = R"({
  "space": {"L1": 10, "L2": 5},
  "targets": [{"x": 3, "y": 2.5, "A": 1}, {"x": 6, "y": 2.5, "A": 1}],
  "agents": [{"u_max": 1, "v_max": 1.5, "r_sense": 2, "beta": 5, "rho": 0.2}],
  "horizon": {"T": 20, "dt": 0.01},
  "B": 15
})";

// J recomputed from the R columns of trace.csv (unit weights, no penalties active)
double trace_objective(const fs::path& csv, double dt, double horizon) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    std::size_t first_r = 0, col = 0;
    {
        std::stringstream hs(line);
        std::string name;
        while (std::getline(hs, name, ',')) {
            if (!name.empty() && name[0] == 'R' && first_r == 0) first_r = col;
            ++col;
        }
    }
    double sum = 0.0;
    while (std::getline(in, line)) {
        std::stringstream rs(line);
        std::string cell;
        for (std::size_t c = 0; std::getline(rs, cell, ','); ++c)
            if (c >= first_r) sum += std::stod(cell);
    }
    return sum * dt / horizon;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: cli_check <pm executable> <work dir>\n";
        return 2;
    }
    pm_exe = fs::absolute(argv[1]).string();
    work = fs::absolute(argv[2]);
    fs::remove_all(work);
    fs::create_directories(work);

    write(work / "small.json", kSmallScenario);
    write(work / "ellipse.json",
          R"({"family":"ellipse","agents":[{"X":3.8791,"Y":2.4675,"a":3.8994,"b":1.8926,"phi":-0.0066}]})");
    write(work / "smooth.json", R"({"family":"ellipse","agents":[{"X":4.5,"Y":2.5,"a":2.0,"b":1.0,"phi":0.3}]})");
    write(work / "flat.json",
          R"({"family":"fourier","agents":[{"fx":0.159,"fy":0.159,"a":[5,0,0],"b":[2,0,0],"phix":[0,0],"phiy":[0,0]}]})");

    // simulate
    int code = run("simulate --scenario case-a --params ellipse.json --out run1");
    expect(code == 0, "simulate exits 0");
    for (const char* f : {"trace.csv", "events.jsonl", "summary.json", "manifest.json"})
        expect(fs::exists(work / "run1" / f), std::string("simulate writes ") + f);
    auto summary = read_json(work / "run1" / "summary.json");
    for (const char* k : {"J", "J1", "J2", "J3", "diagnostics"})
        expect(summary.contains(k), std::string("summary has ") + k);
    double J = summary["J"].get<double>();
    expect(summary["J2"].get<double>() == 0.0 && summary["J3"].get<double>() == 0.0, "reported ellipse is collision free");
    double recomputed = trace_objective(work / "run1" / "trace.csv", 0.01, 40.0);
    expect(std::abs(recomputed - J) <= 1e-9 * J, "summary J equals trace-recomputed J");
    expect(manifest_status("run1") == 0, "manifest records exit 0");

    code = run("simulate --scenario case-a --params ellipse.json --out run1b");
    expect(slurp(work / "run1" / "trace.csv") == slurp(work / "run1b" / "trace.csv") &&
               slurp(work / "run1" / "events.jsonl") == slurp(work / "run1b" / "events.jsonl"),
           "simulate artifacts are byte-identical across runs");

    expect(run("simulate --scenario case-a --params missing.json --out run2") == 2, "missing params file exits 2");
    expect(manifest_status("run2") == 2, "manifest written on the error path");
    expect(run("simulate --scenario nowhere.json --params ellipse.json --out run3") == 2, "missing scenario exits 2");
    expect(run("simulate --scenario small.json --params flat.json --out run4") == 3, "degenerate curve exits 3");
    expect(manifest_status("run4") == 3, "manifest records exit 3");

    // grad-check
    code = run("grad-check --scenario small.json --params smooth.json --mode paper --out gc1");
    expect(code == 0, "paper-mode grad-check passes");
    auto report = read_json(work / "gc1" / "gradcheck.json");
    std::vector<std::string> names;
    for (const auto& c : report["components"]) names.push_back(c["name"]);
    expect(names == std::vector<std::string>{"agent0.X", "agent0.Y", "agent0.a", "agent0.b", "agent0.phi"},
           "report lists every component by name");
    expect(run("grad-check --scenario small.json --params smooth.json --mode paper --tolerance 0 --out gc2") == 5,
           "tolerance 0 exits 5");

    // optimize
    const std::string opt = "optimize --scenario small.json --family ellipse --starts 2 --seed 7 --max-iters 5";
    expect(run(opt + " --out opt1") == 0, "optimize exits 0");
    expect(run(opt + " --out opt2") == 0, "optimize repeat exits 0");
    for (const char* f : {"convergence.csv", "best_params.json", "summary.json", "trace.csv", "events.jsonl"}) {
        expect(fs::exists(work / "opt1" / f), std::string("optimize writes ") + f);
        expect(slurp(work / "opt1" / f) == slurp(work / "opt2" / f), std::string("optimize ") + f + " is identical");
    }
    expect(slurp(work / "opt1" / "convergence.csv").rfind("start,h,J,J1,J2,J3,alpha,grad_norm\n", 0) == 0,
           "convergence header");

    code = run("optimize --scenario case-b --family fourier --starts 1 --seed 3 --max-iters 1 --out opt3");
    expect(code == 0, "fourier optimize on case-b exits 0");
    if (code == 0) {
        auto best = read_json(work / "opt3" / "best_params.json");
        bool eleven = best["family"] == "fourier" && best["agents"].size() == 2;
        for (const auto& a : best["agents"])
            eleven = eleven && 1 + a["a"].size() + a["b"].size() + a["phix"].size() + a["phiy"].size() == 11;
        expect(eleven, "fourier best params carry 11 optimized entries per agent");
    }
    expect(run("optimize --scenario small.json --family fourier --init flat.json --out opt4") == 4,
           "all starts failing exits 4");

    // sweep
    code = run("sweep --scenario small.json --family ellipse --sensing velocity,distance-only --starts 1 --max-iters 3 "
               "--out sw1");
    expect(code == 0, "sweep exits 0");
    std::ifstream table(work / "sw1" / "comparison.csv");
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(table, line)) rows.push_back(line);
    expect(rows.size() == 3 && rows[0] == "configuration,J,J2,J3", "comparison table has a header and two rows");
    expect(fs::exists(work / "sw1" / "ellipse-velocity" / "summary.json") &&
               fs::exists(work / "sw1" / "ellipse-distance-only" / "summary.json"),
           "one directory per configuration");
    expect(run("sweep --scenario small.json --family ellipse --sensing '' --out sw2") == 2, "empty sweep axis exits 2");
    expect(manifest_status("sw2") == 2, "sweep manifest on the error path");

    expect(run("bogus") == 2, "unknown subcommand exits 2");

    std::cout << (failures == 0 ? "all CLI checks passed" : "CLI checks failed") << '\n';
    return failures == 0 ? 0 : 1;
}
