#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vmblab {

enum class Scenario { fluid, hierarchy, kinetic, limit_sweep, inequality_audit };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct InitSpec {
    std::string name = "random_small";
    double amplitude = 0.01;
};

// Precedence: built-in defaults < TOML file < command-line flags.
struct RunConfig {
    Scenario scenario = Scenario::fluid;
    int grid_n = 8;
    int hermite_M = 4;
    double nu0 = 1.0;
    std::string frequency_mode = "constant";
    std::vector<double> epsilon_list{0.5};
    double dt = 0.01;          // fluid step; kinetic runs use dt * epsilon
    double t_final = 1.0;
    int N_energy = 2;
    std::uint64_t seed = 1;
    InitSpec init;
    std::string output_dir = "vmblab-out";
    int orders = 2;            // expansion orders lifted into the kinetic initial data
    int sample_every = 1;      // steps between CSV rows
    bool lyapunov = true;      // also track the Lyapunov energy in kinetic runs
    double tol_rel = 1e-3;     // energy monitor tolerance, relative to E(0)

    double kinetic_dt(double eps) const { return dt * eps; }
};

// Reads a TOML file over the defaults. Unknown keys are rejected.
RunConfig load_config(const std::string& path, RunConfig base = {});
RunConfig parse_config(const std::string& toml_text, RunConfig base = {});

// Throws ConfigInvalid naming the offending field.
void validate(const RunConfig& c);

// Warnings that do not stop a run (e.g. amplitude outside the small-data regime).
std::vector<std::string> config_warnings(const RunConfig& c);

std::string config_to_json(const RunConfig& c);
std::string config_to_toml(const RunConfig& c);

}  // namespace vmblab
