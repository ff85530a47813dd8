#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"

using namespace tvckit;
using namespace tvckit::cli;
namespace fs = std::filesystem;

namespace {

const std::string kProblems = TVCKIT_PROBLEMS_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("tvckit-cli-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> out;
    std::ifstream is(p);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

RunConfig config(const std::string& command, const std::string& problem, const TempDir& dir) {
    RunConfig c;
    c.command = command;
    c.problem_file = kProblems + "/" + problem;
    c.out_dir = dir.path.string();
    return c;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cfg(const RunConfig& c) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(c, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("solve writes the path and report") {
    TempDir dir;
    auto c = config("solve", "counterexample.prob", dir);
    c.horizon = 20;
    const auto r = run_cfg(c);
    CHECK(r.code == kExitOk);
    const auto rows = lines(dir.path / "path.csv");
    REQUIRE(rows.size() == 24);
    CHECK(rows[0] == "t,c");
    CHECK(rows[1] == "0,1");
    CHECK(rows[2] == "1,0.75");
    CHECK(rows[6] == "5,0.625");
    const auto report = nlohmann::json::parse(slurp(dir.path / "solve_report.json"));
    CHECK(report["converged"] == true);
    CHECK(report["iterations"].get<int>() >= 0);
    CHECK(report["residual_norm"].get<double>() < 1e-12);
    CHECK(r.out.find("steady state") != std::string::npos);
}

TEST_CASE("solve errors") {
    TempDir dir;
    auto c = config("solve", "does_not_exist.prob", dir);
    c.horizon = 10;
    auto r = run_cfg(c);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("does_not_exist.prob") != std::string::npos);

    c = config("solve", "counterexample.prob", dir);
    c.horizon = 10;
    c.mode = AssemblyMode::PinnedInitial;
    r = run_cfg(c);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("semantic") != std::string::npos);

    c = config("solve", "counterexample.prob", dir);
    r = run_cfg(c);
    CHECK(r.code == kExitError);
}

TEST_CASE("JSON format for tabular artifacts") {
    TempDir dir;
    auto c = config("solve", "counterexample.prob", dir);
    c.horizon = 6;
    c.format = OutputFormat::Json;
    CHECK(run_cfg(c).code == kExitOk);
    const auto rows = nlohmann::json::parse(slurp(dir.path / "path.json"));
    REQUIRE(rows.size() == 9);
    CHECK(rows[5]["t"] == 5);
    CHECK(rows[5]["c"] == 0.625);
}

TEST_CASE("check-tvc on the counterexample is a violation") {
    TempDir dir;
    auto c = config("check-tvc", "counterexample.prob", dir);
    c.perturb = "p";
    const auto r = run_cfg(c);
    CHECK(r.code == kExitViolated);
    const auto v = nlohmann::json::parse(slurp(dir.path / "tvc_verdict.json"));
    CHECK(std::fabs(v["liminf_estimate"].get<double>() - 1.0) <= 1e-9);
    CHECK(v["classification"] == "violated");
    const auto rows = lines(dir.path / "tvc_series.csv");
    CHECK(rows[0] == "T_prime,boundary_term,running_inf");
    CHECK(rows.size() == 47);
    CHECK(rows[1] == "5,1,1");
}

TEST_CASE("check-tvc with the Michel perturbation on the discounted model") {
    TempDir dir;
    auto c = config("check-tvc", "discounted_tracking.prob", dir);
    c.michel = 0.5;
    c.window_min = 10;
    c.window_max = 60;
    for (auto mode : {AssemblyMode::FreeInitial, AssemblyMode::PinnedInitial}) {
        c.mode = mode;
        const auto r = run_cfg(c);
        CHECK(r.code == kExitOk);
        const auto v = nlohmann::json::parse(slurp(dir.path / "tvc_verdict.json"));
        CHECK(std::fabs(v["liminf_estimate"].get<double>()) <= 1e-4);
    }
}

TEST_CASE("check-tvc with a zero perturbation") {
    TempDir dir;
    auto c = config("check-tvc", "discounted_tracking.prob", dir);
    c.perturb = "zero";
    CHECK(run_cfg(c).code == kExitOk);
    const auto rows = lines(dir.path / "tvc_series.csv");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].substr(rows[k].find(',')) == ",0,0");
    }
}

TEST_CASE("check-tvc argument errors") {
    TempDir dir;
    auto c = config("check-tvc", "counterexample.prob", dir);
    c.perturb = "nope";
    CHECK(run_cfg(c).code == kExitError);
    c.perturb.reset();
    c.window_min = 10;
    c.window_max = 5;
    CHECK(run_cfg(c).code == kExitError);
}

TEST_CASE("diagnose on the counterexample") {
    TempDir dir;
    auto c = config("diagnose", "counterexample.prob", dir);
    const auto r = run_cfg(c);
    CHECK(r.code == kExitViolated);
    const auto v = nlohmann::json::parse(slurp(dir.path / "assumption_verdict.json"));
    CHECK(v["L1"] == "divergent");
    CHECK(std::fabs(v["L2"].get<double>() - 0.75) <= 1e-6);
    CHECK(v["classification"] == "non-uniform");
    CHECK(v["uniformity_defect"].size() == 7);
    const auto rows = lines(dir.path / "a_grid.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == "T_prime,0.1,0.01,0.001,0.0001");
}

TEST_CASE("diagnose on the discounted model") {
    TempDir dir;
    auto c = config("diagnose", "discounted_tracking.prob", dir);
    for (auto ref : {Reference::Steady, Reference::Euler}) {
        c.reference = ref;
        const auto r = run_cfg(c);
        CHECK(r.code == kExitOk);
        const auto v = nlohmann::json::parse(slurp(dir.path / "assumption_verdict.json"));
        CHECK(std::fabs(v["L1"].get<double>() - v["L2"].get<double>()) <= 1e-4);
    }
    c.perturb = "zero";
    c.reference.reset();
    CHECK(run_cfg(c).code == kExitOk);
    const auto rows = lines(dir.path / "a_grid.csv");
    CHECK(rows[1] == "10,0,0,0,0");
}

TEST_CASE("diagnose rejects a bad grid") {
    TempDir dir;
    auto c = config("diagnose", "counterexample.prob", dir);
    c.eps = {1e-1, 1e-2};
    CHECK(run_cfg(c).code == kExitError);
    c = config("diagnose", "counterexample.prob", dir);
    c.threads = 0;
    CHECK(run_cfg(c).code == kExitError);
}

TEST_CASE("compare") {
    TempDir dir;
    auto c = config("solve", "counterexample.prob", dir);
    c.horizon = 40;
    REQUIRE(run_cfg(c).code == kExitOk);
    const auto euler = lines(dir.path / "path.csv");
    {
        std::ofstream os(dir.path / "shifted.csv");
        os << euler[0] << "\n";
        for (std::size_t k = 1; k < euler.size(); ++k) {
            const int t = static_cast<int>(k) - 1;
            const double v = std::stod(euler[k].substr(euler[k].find(',') + 1));
            os << t << "," << format_real(t >= 2 ? v + 0.1 : v) << "\n";
        }
        std::ofstream shorter(dir.path / "short.csv");
        for (std::size_t k = 0; k < 20; ++k) shorter << euler[k] << "\n";
    }
    fs::copy_file(dir.path / "path.csv", dir.path / "euler.csv");

    auto cmp = config("compare", "counterexample.prob", dir);
    cmp.path_files = {(dir.path / "euler.csv").string(), (dir.path / "euler.csv").string()};
    auto r = run_cfg(cmp);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("incomparable") != std::string::npos);
    for (const auto& row : lines(dir.path / "overtaking.csv")) {
        if (row != "T_prime,D") CHECK(row.substr(row.find(',')) == ",0");
    }

    cmp.path_files = {(dir.path / "euler.csv").string(), (dir.path / "shifted.csv").string()};
    r = run_cfg(cmp);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("second overtakes") != std::string::npos);

    cmp.path_files = {(dir.path / "euler.csv").string(), (dir.path / "short.csv").string()};
    r = run_cfg(cmp);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("lengths differ") != std::string::npos);
    CHECK(lines(dir.path / "overtaking.csv").size() == 18);

    {
        std::ofstream bad(dir.path / "bad.csv");
        bad << "t,c\n0,1\n1,x\n";
    }
    cmp.path_files = {(dir.path / "euler.csv").string(), (dir.path / "bad.csv").string()};
    r = run_cfg(cmp);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("bad.csv:3") != std::string::npos);
}

TEST_CASE("command line parsing") {
    TempDir dir;
    const std::string out = dir.path.string();
    const std::string prob = kProblems + "/counterexample.prob";
    std::vector<std::string> args{"tvckit", "diagnose", prob, "--eps", "0.1,0.01,0.001,0.0001",
                                  "--threads", "2", "--out", out};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    CHECK(cli::main(static_cast<int>(argv.size()), argv.data()) == kExitViolated);
    CHECK(lines(dir.path / "a_grid.csv").size() == 8);

    std::vector<std::string> bad{"tvckit", "check-tvc", prob, "--window", "5-50", "--out", out};
    std::vector<char*> bargv;
    for (auto& a : bad) bargv.push_back(a.data());
    CHECK(cli::main(static_cast<int>(bargv.size()), bargv.data()) == kExitError);

    std::vector<std::string> unknown{"tvckit", "frobnicate"};
    std::vector<char*> uargv;
    for (auto& a : unknown) uargv.push_back(a.data());
    CHECK(cli::main(static_cast<int>(uargv.size()), uargv.data()) == kExitError);
}
