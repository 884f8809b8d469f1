#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "vmblab/error.hpp"
#include "vmblab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vmblab: scenario runner for the two-species Vlasov-Maxwell-Boltzmann diffusive limit"};
    app.set_version_flag("--version", std::string(vmblab::vmblab_version));
    app.require_subcommand(1);

    // Precedence: built-in defaults < config file < command-line flags.
    std::string config_path, scenario, out_dir, init_name;
    std::vector<double> eps;
    std::optional<double> dt, t_final, amplitude;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
    run->add_option("--config", config_path, "TOML config file")->required();
    run->add_option("--scenario", scenario, "fluid | hierarchy | kinetic | limit_sweep | inequality_audit");
    run->add_option("--epsilon", eps, "epsilon values (replace epsilon_list)");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--dt", dt, "time step (kinetic runs use dt * epsilon)");
    run->add_option("--t-final", t_final, "final time");
    run->add_option("--grid-n", grid_n, "grid points per direction");
    run->add_option("--seed", seed, "seed for random initial data");
    run->add_option("--init", init_name, "initializer name");
    run->add_option("--amplitude", amplitude, "initializer amplitude");

    std::string dir;
    auto* verify = app.add_subcommand("verify", "re-check invariants from the snapshots of a run directory");
    verify->add_option("run-dir", dir)->required();
    auto* table = app.add_subcommand("table", "print the epsilon-convergence table of a limit_sweep directory");
    table->add_option("sweep-dir", dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            vmblab::RunConfig c = vmblab::load_config(config_path);
            if (!scenario.empty()) c.scenario = vmblab::scenario_from_string(scenario);
            if (!eps.empty()) c.epsilon_list = eps;
            if (!out_dir.empty()) c.output_dir = out_dir;
            if (dt) c.dt = *dt;
            if (t_final) c.t_final = *t_final;
            if (grid_n) c.grid_n = *grid_n;
            if (seed) c.seed = *seed;
            if (!init_name.empty()) c.init.name = init_name;
            if (amplitude) c.init.amplitude = *amplitude;
            const int code = vmblab::run_scenario(c, std::cerr);
            if (code == 0) std::cout << "run complete: " << c.output_dir << "\n";
            return code;
        }
        if (*verify) return vmblab::verify_run(dir, std::cout);
        if (*table) return vmblab::emit_table(dir, std::cout);
    } catch (const vmblab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
