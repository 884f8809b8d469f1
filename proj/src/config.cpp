#include "vmblab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "third_party/toml.hpp"
#include "vmblab/collision.hpp"
#include "vmblab/error.hpp"
#include "vmblab/init.hpp"

namespace vmblab {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::fluid: return "fluid";
        case Scenario::hierarchy: return "hierarchy";
        case Scenario::kinetic: return "kinetic";
        case Scenario::limit_sweep: return "limit_sweep";
        case Scenario::inequality_audit: return "inequality_audit";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    for (Scenario x : {Scenario::fluid, Scenario::hierarchy, Scenario::kinetic, Scenario::limit_sweep,
                       Scenario::inequality_audit})
        if (to_string(x) == s) return x;
    throw ConfigInvalid("scenario: unknown value '" + s +
                        "' (expected fluid, hierarchy, kinetic, limit_sweep or inequality_audit)");
}

namespace {

double get_real(const toml::node& n, const std::string& key) {
    if (auto v = n.value<double>()) return *v;
    throw ConfigInvalid(key + ": expected a number");
}

std::int64_t get_int(const toml::node& n, const std::string& key) {
    if (n.is_integer()) return *n.value<std::int64_t>();
    throw ConfigInvalid(key + ": expected an integer");
}

std::string get_string(const toml::node& n, const std::string& key) {
    if (auto v = n.value<std::string>()) return *v;
    throw ConfigInvalid(key + ": expected a string");
}

bool get_bool(const toml::node& n, const std::string& key) {
    if (auto v = n.value<bool>()) return *v;
    throw ConfigInvalid(key + ": expected true or false");
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig c) {
    toml::table tbl;
    try {
        tbl = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "config: TOML parse error at line " << e.source().begin.line << ": " << e.description();
        throw ConfigInvalid(os.str());
    }
    for (auto&& [k, node] : tbl) {
        const std::string key(k.str());
        if (key == "scenario") c.scenario = scenario_from_string(get_string(node, key));
        else if (key == "grid_n") c.grid_n = int(get_int(node, key));
        else if (key == "hermite_M") c.hermite_M = int(get_int(node, key));
        else if (key == "nu0") c.nu0 = get_real(node, key);
        else if (key == "frequency_mode") c.frequency_mode = get_string(node, key);
        else if (key == "epsilon_list") {
            const toml::array* arr = node.as_array();
            if (!arr) throw ConfigInvalid("epsilon_list: expected an array of numbers");
            c.epsilon_list.clear();
            for (auto&& e : *arr) c.epsilon_list.push_back(get_real(e, "epsilon_list"));
        } else if (key == "dt") c.dt = get_real(node, key);
        else if (key == "t_final") c.t_final = get_real(node, key);
        else if (key == "N_energy") c.N_energy = int(get_int(node, key));
        else if (key == "seed") {
            const auto s = get_int(node, key);
            if (s < 0) throw ConfigInvalid("seed: must be nonnegative");
            c.seed = std::uint64_t(s);
        } else if (key == "output_dir") c.output_dir = get_string(node, key);
        else if (key == "orders") c.orders = int(get_int(node, key));
        else if (key == "sample_every") c.sample_every = int(get_int(node, key));
        else if (key == "lyapunov") c.lyapunov = get_bool(node, key);
        else if (key == "tol_rel") c.tol_rel = get_real(node, key);
        else if (key == "init") {
            const toml::table* it = node.as_table();
            if (!it) throw ConfigInvalid("init: expected a table with name and amplitude");
            for (auto&& [ik, in] : *it) {
                const std::string sub(ik.str());
                if (sub == "name") c.init.name = get_string(in, "init.name");
                else if (sub == "amplitude") c.init.amplitude = get_real(in, "init.amplitude");
                else throw ConfigInvalid("init." + sub + ": unknown key");
            }
        } else {
            throw ConfigInvalid(key + ": unknown key");
        }
    }
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void validate(const RunConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v))
            throw ConfigInvalid(std::string(name) + ": must be a positive finite number (got " + std::to_string(v) + ")");
    };
    if (c.grid_n < 4 || c.grid_n % 2 != 0) throw ConfigInvalid("grid_n: must be an even integer >= 4");
    if (c.hermite_M < 2) throw ConfigInvalid("hermite_M: must be >= 2");
    positive(c.nu0, "nu0");
    frequency_mode_from_string(c.frequency_mode);
    positive(c.dt, "dt");
    positive(c.t_final, "t_final");
    if (c.N_energy < 0 || c.N_energy > c.grid_n / 2) throw ConfigInvalid("N_energy: must lie in [0, grid_n / 2]");
    if (!(c.init.amplitude >= 0) || !std::isfinite(c.init.amplitude))
        throw ConfigInvalid("init.amplitude: must be nonnegative");
    const auto& names = initializer_names();
    if (std::find(names.begin(), names.end(), c.init.name) == names.end())
        throw UnknownInitializer("init.name: no initializer named '" + c.init.name + "'");
    if (c.orders < 1 || c.orders > 2) throw ConfigInvalid("orders: must be 1 or 2");
    if (c.sample_every < 1) throw ConfigInvalid("sample_every: must be >= 1");
    positive(c.tol_rel, "tol_rel");
    if (c.output_dir.empty()) throw ConfigInvalid("output_dir: must not be empty");
    const bool kinetic = c.scenario == Scenario::kinetic || c.scenario == Scenario::limit_sweep ||
                         c.scenario == Scenario::inequality_audit;
    if (kinetic && c.epsilon_list.empty()) throw ConfigInvalid("epsilon_list: must be non-empty for kinetic scenarios");
    std::set<double> seen;
    for (double e : c.epsilon_list) {
        positive(e, "epsilon_list");
        if (e > 1) throw ConfigInvalid("epsilon_list: entries must lie in (0, 1]");
        if (!seen.insert(e).second) throw ConfigInvalid("epsilon_list: duplicate entry");
    }
    if (c.scenario == Scenario::limit_sweep && c.epsilon_list.size() < 2)
        throw ConfigInvalid("epsilon_list: limit_sweep needs at least two values");
}

std::vector<std::string> config_warnings(const RunConfig& c) {
    std::vector<std::string> w;
    if (c.init.amplitude >= 0.1)
        w.push_back("init.amplitude = " + std::to_string(c.init.amplitude) +
                    " is outside the small-data regime (>= 0.1); decay and limit results may not apply");
    return w;
}

std::string config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["scenario"] = to_string(c.scenario);
    j["grid_n"] = c.grid_n;
    j["hermite_M"] = c.hermite_M;
    j["nu0"] = c.nu0;
    j["frequency_mode"] = c.frequency_mode;
    j["epsilon_list"] = c.epsilon_list;
    j["dt"] = c.dt;
    j["t_final"] = c.t_final;
    j["N_energy"] = c.N_energy;
    j["seed"] = c.seed;
    j["init"] = {{"name", c.init.name}, {"amplitude", c.init.amplitude}};
    j["output_dir"] = c.output_dir;
    j["orders"] = c.orders;
    j["sample_every"] = c.sample_every;
    j["lyapunov"] = c.lyapunov;
    j["tol_rel"] = c.tol_rel;
    return j.dump(2);
}

std::string config_to_toml(const RunConfig& c) {
    toml::array eps;
    for (double e : c.epsilon_list) eps.push_back(e);
    toml::table t{{"scenario", to_string(c.scenario)},
                  {"grid_n", c.grid_n},
                  {"hermite_M", c.hermite_M},
                  {"nu0", c.nu0},
                  {"frequency_mode", c.frequency_mode},
                  {"epsilon_list", eps},
                  {"dt", c.dt},
                  {"t_final", c.t_final},
                  {"N_energy", c.N_energy},
                  {"seed", std::int64_t(c.seed)},
                  {"output_dir", c.output_dir},
                  {"orders", c.orders},
                  {"sample_every", c.sample_every},
                  {"lyapunov", c.lyapunov},
                  {"tol_rel", c.tol_rel},
                  {"init", toml::table{{"name", c.init.name}, {"amplitude", c.init.amplitude}}}};
    std::ostringstream os;
    os << t << "\n";
    return os.str();
}

}  // namespace vmblab
