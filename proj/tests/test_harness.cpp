#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "vmblab/error.hpp"
#include "vmblab/harness.hpp"

using namespace vmblab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vmblab_test_harness_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small(Scenario s, const fs::path& out) {
    RunConfig c;
    c.scenario = s;
    c.grid_n = 8;
    c.dt = 0.01;
    c.t_final = 0.05;
    c.init = {"taylor_green_like", 0.01};
    c.output_dir = out.string();
    return c;
}

int cli(const std::string& args, std::string* output = nullptr) {
    const fs::path log = fs::temp_directory_path() / ("vmblab_cli_" + std::to_string(::getpid()) + ".log");
    const int st = std::system((std::string(VMBLAB_BIN) + " " + args + " > " + log.string() + " 2>&1").c_str());
    if (output) *output = slurp(log);
    fs::remove(log);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("zero amplitude fluid run writes an all-zero series") {
    const fs::path out = scratch("zero");
    RunConfig c = small(Scenario::fluid, out);
    c.init.amplitude = 0;
    std::ostringstream log;
    REQUIRE(run_scenario(c, log) == 0);
    std::istringstream csv(slurp(out / "fluid.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("t,u_h2,theta_h2,sigma_h2", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // time column
        while (std::getline(ss, cell, ',')) CHECK(std::stod(cell) == 0.0);
        ++rows;
    }
    CHECK(rows == 6);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(m["exit_code"] == 0);
    CHECK(m["summary"]["decay_fit"].is_null());
    CHECK(m["software"]["version"] == vmblab_version);
    CHECK(m["transport"]["eta"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(verify_run(out.string(), log) == 0);
}

TEST_CASE("manifest config reproduces the run") {
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    RunConfig c = small(Scenario::kinetic, a);
    c.epsilon_list = {1.0, 0.5};
    c.init = {"random_small", 0.01};
    c.seed = 3;
    std::ostringstream log;
    REQUIRE(run_scenario(c, log) == 0);
    // re-run from the stored toml into another directory
    RunConfig d = parse_config(slurp(a / "config.toml"));
    d.output_dir = b.string();
    REQUIRE(run_scenario(d, log) == 0);
    for (const char* e : {"eps_1", "eps_0.5"}) {
        CHECK(slurp(a / e / "energy.csv") == slurp(b / e / "energy.csv"));
        CHECK(slurp(a / e / "final.kin") == slurp(b / e / "final.kin"));
    }
    std::ostringstream v;
    CHECK(verify_run(a.string(), v) == 0);
    CHECK(v.str().find("FAIL") == std::string::npos);
}

TEST_CASE("hierarchy run verifies") {
    const fs::path out = scratch("hier");
    std::ostringstream log;
    REQUIRE(run_scenario(small(Scenario::hierarchy, out), log) == 0);
    CHECK(fs::exists(out / "hierarchy.csv"));
    CHECK(verify_run(out.string(), log) == 0);
}

TEST_CASE("inequality audit writes violations and verdicts") {
    const fs::path out = scratch("audit");
    RunConfig c = small(Scenario::inequality_audit, out);
    c.epsilon_list = {1.0};
    std::ostringstream log;
    REQUIRE(run_scenario(c, log) == 0);
    CHECK(fs::exists(out / "violations.csv"));
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    const auto& r = m["summary"]["runs"][0];
    CHECK(r["verdict_functional"] == "lyapunov");
    CHECK(r["lyapunov"]["violations"] == 0);
    CHECK(r.contains("plain"));
}

TEST_CASE("limit sweep emits a convergence table") {
    const fs::path out = scratch("sweep");
    RunConfig c = small(Scenario::limit_sweep, out);
    c.epsilon_list = {0.25, 0.5};
    std::ostringstream log;
    REQUIRE(run_scenario(c, log) == 0);
    std::ostringstream t;
    REQUIRE(emit_table(out.string(), t) == 0);
    const std::string csv = slurp(out / "table.csv");
    CHECK(csv.rfind("epsilon,error_order1,observed_order1,error_order2,observed_order2\n0.5,", 0) == 0);
    CHECK(t.str().find("fitted order") != std::string::npos);
    CHECK_THROWS_AS(emit_table(scratch("nothing").string(), t), IoError);
}

TEST_CASE("invalid config propagates as a config error") {
    RunConfig c = small(Scenario::fluid, scratch("bad"));
    c.dt = -0.1;
    std::ostringstream log;
    CHECK_THROWS_AS(run_scenario(c, log), ConfigInvalid);
    c.dt = 0.01;
    c.init.amplitude = 0.2;
    REQUIRE(run_scenario(c, log) == 0);
    CHECK(log.str().find("warning: init.amplitude") != std::string::npos);
}

TEST_CASE("cli exit codes and overrides") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "run.toml");
        f << "scenario = 'fluid'\ndt = 0.01\nt_final = 0.02\noutput_dir = '" << (dir / "from_file").string() << "'\n";
    }
    std::string out;
    CHECK(cli("run --config " + (dir / "run.toml").string() + " --dt 0", &out) == 1);
    CHECK(out.find("dt") != std::string::npos);
    CHECK(cli("run --config " + (dir / "missing.toml").string()) == 1);
    CHECK(cli("run --config " + (dir / "run.toml").string() + " --scenario warp") == 1);
    CHECK(cli("frobnicate") == 1);
    // flags win over the file
    CHECK(cli("run --config " + (dir / "run.toml").string() + " --out " + (dir / "flag").string() +
              " --scenario hierarchy --t-final 0.03") == 0);
    CHECK(!fs::exists(dir / "from_file"));
    const auto m = nlohmann::json::parse(slurp(dir / "flag" / "manifest.json"));
    CHECK(m["scenario"] == "hierarchy");
    CHECK(m["config"]["t_final"] == 0.03);
    CHECK(cli("verify " + (dir / "flag").string()) == 0);
    CHECK(cli("table " + (dir / "flag").string()) == 1);
}
