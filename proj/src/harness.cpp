#include "vmblab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vmblab/error.hpp"
#include "vmblab/init.hpp"
#include "vmblab/scenarios.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace vmblab {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p) {
        if (!out_) throw IoError("cannot write " + p.string());
        row_strings(header);
    }
    void row(const std::vector<double>& v) {
        std::vector<std::string> s;
        for (double x : v) s.push_back(num(x));
        row_strings(s);
    }
    void row_strings(const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    out << s;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

// Tag used for per-epsilon directories, e.g. eps_0.25.
std::string eps_tag(double e) {
    std::ostringstream os;
    os << "eps_" << std::setprecision(12) << e;
    return os.str();
}

struct Setup {
    GridPtr grid;
    std::shared_ptr<const HermiteSpace> space;
    std::shared_ptr<const CollisionModel> model;
};

Setup make_setup(const RunConfig& c) {
    Setup s;
    s.grid = make_grid(c.grid_n);
    s.space = std::make_shared<const HermiteSpace>(c.hermite_M);
    s.model = std::make_shared<const CollisionModel>(s.space, c.nu0, frequency_mode_from_string(c.frequency_mode));
    return s;
}

RunConfig config_from_manifest(const json& m) {
    if (m.value("format", "") != "vmblab-run") throw IoError("manifest.json is not a vmblab run manifest");
    return parse_config(m.at("config_toml").get<std::string>());
}

json transport_json(const CollisionModel& C) {
    const Transport& t = C.transport();
    return {{"eta", t.eta}, {"kappa", t.kappa}, {"alpha", t.alpha}};
}

json fit_json(const DecayFit& f) { return {{"rate", f.rate}, {"constant", f.constant}, {"residual", f.residual}}; }

// ---------------------------------------------------------------------------

json run_fluid_scenario(const RunConfig& c, const Setup& S, const FluidState& s1, const fs::path& out,
                        json& artifacts) {
    FluidState fin;
    const auto samples = run_fluid(s1, S.model->transport(), c.dt, c.t_final, c.sample_every, &fin);
    {
        Csv csv(out / "fluid.csv", {"t", "u_h2", "theta_h2", "sigma_h2", "norm_sum", "int_u1", "int_u2", "int_u3",
                                    "int_theta", "int_sigma"});
        for (const auto& r : samples)
            csv.row({r.t, r.u_h2, r.theta_h2, r.sigma_h2, r.norm_sum(), r.int_u[0], r.int_u[1], r.int_u[2],
                     r.int_theta, r.int_sigma});
    }
    artifacts.push_back("fluid.csv");
    fs::create_directories(out / "snapshots");
    for (const auto& [tag, st] : {std::pair<std::string, const FluidState*>{"initial", &s1}, {"final", &fin}}) {
        write_specf((out / "snapshots" / ("fluid_" + tag + "_u.specf")).string(), st->u);
        write_specf((out / "snapshots" / ("fluid_" + tag + "_theta.specf")).string(), st->theta);
        write_specf((out / "snapshots" / ("fluid_" + tag + "_sigma.specf")).string(), st->sigma);
    }
    artifacts.push_back("snapshots/");
    const Transport& tc = S.model->transport();
    json sum;
    sum["lambda"] = 0.25 * std::min({tc.eta, tc.kappa, tc.alpha});
    std::vector<double> t, v;
    bool positive = true;
    for (const auto& r : samples) {
        t.push_back(r.t);
        v.push_back(r.norm_sum());
        positive = positive && r.norm_sum() > 0;
    }
    if (positive && samples.size() >= 10) sum["decay_fit"] = fit_json(fit_decay(t, v, DecayKind::exponential));
    else sum["decay_fit"] = nullptr;
    double drift = 0;
    const auto &a = samples.front(), &b = samples.back();
    for (int i = 0; i < 3; ++i) drift = std::max(drift, std::abs(b.int_u[i] - a.int_u[i]));
    drift = std::max({drift, std::abs(b.int_theta - a.int_theta), std::abs(b.int_sigma - a.int_sigma)});
    sum["conservation_drift_per_time"] = drift / c.t_final;
    return sum;
}

json run_hierarchy_scenario(const RunConfig& c, const Setup& S, const FluidState& s1, const fs::path& out,
                            json& artifacts) {
    const int steps = std::max(1, int(std::lround(c.t_final / c.dt)));
    ExpansionSet set = build_full_second_order(s1, *S.model, c.t_final / steps, steps, c.sample_every);
    set.provenance = config_to_json(c);
    set.save((out / "expansion").string(), *S.model);
    artifacts.push_back("expansion/");
    Csv csv(out / "hierarchy.csv",
            {"t", "u1_l2", "theta1_l2", "sigma1_l2", "u2_l2", "theta2_l2", "sigma2_l2", "E2_l2", "B1_l2", "B2_l2",
             "res_f1_kernel", "res_g1_kernel", "res_f2", "res_g2", "res_f3_hydro", "res_g3_hydro", "res_maxwell2"});
    double worst = 0, b2max = 0;
    for (const auto& sn : set.snapshots) {
        const HierarchyResidual r = hierarchy_residual(sn.order1, sn.order2, *S.model);
        const OrderFields& o1 = sn.fields[0];
        const OrderFields* o2 = sn.fields.size() > 1 ? &sn.fields[1] : nullptr;
        csv.row({sn.t, sn.order1.u.norm_l2(), sn.order1.theta.norm_l2(), sn.order1.sigma.norm_l2(),
                 sn.order2.u.norm_l2(), sn.order2.theta.norm_l2(), sn.order2.sigma.norm_l2(),
                 o2 ? o2->E.norm_l2() : 0.0, o1.B.norm_l2(), o2 ? o2->B.norm_l2() : 0.0, r.f1_kernel, r.g1_kernel,
                 r.f2, r.g2, r.f3_hydro, r.g3_hydro, r.maxwell2});
        worst = std::max({worst, r.f1_kernel, r.g1_kernel, r.f2, r.g2, r.f3_hydro, r.g3_hydro, r.maxwell2});
        if (o2) b2max = std::max(b2max, o2->B.norm_l2());
    }
    artifacts.push_back("hierarchy.csv");
    return {{"max_hierarchy_residual", worst}, {"max_B2_l2", b2max}, {"snapshots", set.snapshots.size()}};
}

json run_kinetic_scenario(const RunConfig& c, const Setup& S, const FluidState& s1, const fs::path& out,
                          json& artifacts, bool audit) {
    const std::size_t ne = c.epsilon_list.size();
    std::vector<json> per(ne);
    std::vector<std::vector<std::vector<std::string>>> viol(ne);
    parallel_for(int(ne), [&](int i) {
        const double eps = c.epsilon_list[i];
        double corr = 0;
        const KineticState init = kinetic_initial_data(s1, *S.model, eps, c.orders, &corr);
        std::unique_ptr<LyapunovEnergy> L;
        if (c.lyapunov) L = std::make_unique<LyapunovEnergy>(S.grid, S.model, eps, c.N_energy);
        const KineticRun run = run_kinetic(init, S.model, c.kinetic_dt(eps), c.t_final, c.N_energy, c.sample_every,
                                           L.get());
        const fs::path d = out / eps_tag(eps);
        fs::create_directories(d);
        {
            Csv csv(d / "energy.csv",
                    {"t", "E_N", "E_lyap", "D_N", "hydro_f", "hydro_g", "micro_f", "micro_g", "field_E", "field_B",
                     "D_hydro_f", "D_hydro_g", "D_micro_f", "D_micro_g", "gauss_E", "gauss_B", "mass", "charge",
                     "momentum1", "momentum2", "momentum3", "energy"});
            for (const auto& k : run.samples) {
                const auto& r = k.report;
                const auto& e = r.energy_terms;
                const auto& dd = r.dissipation_terms;
                const auto& q = r.conservation;
                csv.row({r.t, r.E_N, r.E_lyap, r.D_N, e.hydro_f, e.hydro_g, e.micro_f, e.micro_g, e.field_E,
                         e.field_B, dd.hydro_f, dd.hydro_g, dd.micro_f, dd.micro_g, k.gauss_E, k.gauss_B, q.mass,
                         q.charge, q.momentum[0], q.momentum[1], q.momentum[2], q.energy});
            }
        }
        write_kin((d / "initial.kin").string(), run.initial, c.hermite_M);
        write_kin((d / "final.kin").string(), run.final, c.hermite_M);

        std::vector<EnergyReport> reps;
        double gmax = 0;
        for (const auto& k : run.samples) {
            reps.push_back(k.report);
            gmax = std::max({gmax, k.gauss_E, k.gauss_B});
        }
        const EnergyAudit a = audit_energy(reps, c.tol_rel);
        const ConservationDrift dr = conservation_drift(run.samples.front().report.conservation,
                                                        run.samples.back().report.conservation);
        json j;
        j["epsilon"] = eps;
        j["dt"] = run.dt;
        j["steps"] = int(std::lround(c.t_final / run.dt));
        j["kinetic_correction"] = corr;
        j["max_gauss_residual"] = gmax;
        j["conservation_drift_per_time"] = {{"mass", dr.mass / c.t_final},
                                            {"charge", dr.charge / c.t_final},
                                            {"momentum", dr.momentum / c.t_final},
                                            {"energy", dr.energy / c.t_final}};
        if (!run.macroscopic.empty()) {
            j["macroscopic_residuals"] = run.macroscopic;
            j["macroscopic_residuals_t"] = run.macroscopic_t;
        }
        j["plain"] = {{"violations", a.violations_plain}, {"worst_rel", a.worst_plain}, {"sup_ratio", a.sup_plain}};
        if (a.fitted)
            j["plain"]["fits"] = {{"poly_k1", fit_json(a.plain_poly1)},
                                  {"poly_k2", fit_json(a.plain_poly2)},
                                  {"exponential", fit_json(a.plain_exp)}};
        if (a.has_lyap) {
            j["lyapunov"] = {{"violations", a.violations_lyap},
                             {"worst_rel", a.worst_lyap},
                             {"sup_ratio", a.sup_lyap},
                             {"lower_constant", L->lower_constant()},
                             {"upper_constant", L->upper_constant()}};
            if (a.fitted)
                j["lyapunov"]["fits"] = {{"poly_k1", fit_json(a.lyap_poly1)},
                                         {"poly_k2", fit_json(a.lyap_poly2)},
                                         {"exponential", fit_json(a.lyap_exp)}};
        }
        if (audit) {
            const double sup_tol = 1 + c.tol_rel;
            const bool use_l = a.has_lyap;
            j["verdict"] = (use_l ? a.violations_lyap == 0 && a.sup_lyap <= sup_tol
                                  : a.violations_plain == 0 && a.sup_plain <= sup_tol)
                               ? "pass"
                               : "fail";
            j["verdict_functional"] = use_l ? "lyapunov" : "plain";
            for (bool lyap : {false, true}) {
                if (lyap && !a.has_lyap) continue;
                if (reps.size() < 3) break;
                for (const auto& v : energy_inequality_monitor(reps, c.tol_rel, 0, lyap))
                    viol[i].push_back({num(eps), lyap ? "lyapunov" : "plain", num(v.t), num(v.value), num(v.tolerance)});
            }
        }
        per[i] = std::move(j);
    });
    for (double e : c.epsilon_list) artifacts.push_back(eps_tag(e) + "/");
    if (audit) {
        Csv csv(out / "violations.csv", {"epsilon", "functional", "t", "value", "tolerance"});
        for (const auto& v : viol)
            for (const auto& r : v) csv.row_strings(r);
        artifacts.push_back("violations.csv");
    }
    json runs = json::array();
    for (auto& j : per) runs.push_back(std::move(j));
    return {{"runs", runs}};
}

std::vector<std::vector<std::string>> table_rows(const std::vector<LimitRow>& rows) {
    std::vector<std::vector<std::string>> t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string o1 = "", o2 = "";
        if (i > 0) {
            o1 = num(observed_order(rows[i - 1].epsilon, rows[i - 1].err_order1, rows[i].epsilon, rows[i].err_order1));
            o2 = num(observed_order(rows[i - 1].epsilon, rows[i - 1].err_order2, rows[i].epsilon, rows[i].err_order2));
        }
        t.push_back({num(rows[i].epsilon), num(rows[i].err_order1), o1, num(rows[i].err_order2), o2});
    }
    return t;
}

const std::vector<std::string> table_header{"epsilon", "error_order1", "observed_order1", "error_order2",
                                            "observed_order2"};

void print_table(const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
    std::vector<std::size_t> w(table_header.size());
    for (std::size_t c = 0; c < w.size(); ++c) {
        w[c] = table_header[c].size();
        for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < w.size(); ++c) out << (c ? "  " : "") << std::setw(int(w[c])) << r[c];
        out << "\n";
    };
    line(table_header);
    for (const auto& r : rows) line(r);
}

json run_limit_scenario(const RunConfig& c, const Setup& S, const FluidState& s1, const fs::path& out,
                        json& artifacts, std::ostream& log) {
    std::vector<double> eps = c.epsilon_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const auto rows = limit_sweep(s1, S.model, eps, c.dt, c.t_final);
    {
        Csv csv(out / "convergence.csv", table_header);
        for (const auto& r : table_rows(rows)) csv.row_strings(r);
    }
    artifacts.push_back("convergence.csv");
    print_table(table_rows(rows), log);
    std::vector<double> e1, e2;
    for (const auto& r : rows) {
        e1.push_back(r.err_order1);
        e2.push_back(r.err_order2);
    }
    return {{"fitted_order1", fitted_order(eps, e1)}, {"fitted_order2", fitted_order(eps, e2)}};
}

}  // namespace

int run_scenario(const RunConfig& c, std::ostream& log) {
    validate(c);
    for (const auto& w : config_warnings(c)) log << "warning: " << w << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out(c.output_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("output_dir: cannot create '" + c.output_dir + "': " + ec.message());
    write_text(out / "config.toml", config_to_toml(c));

    const Setup S = make_setup(c);
    json manifest;
    manifest["format"] = "vmblab-run";
    manifest["software"] = {{"name", "vmblab"}, {"version", vmblab_version}};
    manifest["scenario"] = to_string(c.scenario);
    manifest["config"] = json::parse(config_to_json(c));
    manifest["config_toml"] = config_to_toml(c);
    manifest["transport"] = transport_json(*S.model);
    json artifacts = json::array({"config.toml"});
    int code = 0;
    try {
        Corrections corr;
        const FluidState s1 = initial_fluid(c.init.name, c.init.amplitude, c.seed, S.grid, &corr);
        manifest["initial_corrections"] = {{"divergence", corr.divergence}, {"sigma_mean", corr.sigma_mean}};
        json summary;
        switch (c.scenario) {
            case Scenario::fluid: summary = run_fluid_scenario(c, S, s1, out, artifacts); break;
            case Scenario::hierarchy: summary = run_hierarchy_scenario(c, S, s1, out, artifacts); break;
            case Scenario::kinetic: summary = run_kinetic_scenario(c, S, s1, out, artifacts, false); break;
            case Scenario::inequality_audit: summary = run_kinetic_scenario(c, S, s1, out, artifacts, true); break;
            case Scenario::limit_sweep: summary = run_limit_scenario(c, S, s1, out, artifacts, log); break;
        }
        manifest["summary"] = summary;
        manifest["status"] = "ok";
    } catch (const Error& e) {
        if (e.error_class() == ErrorClass::config) throw;
        manifest["status"] = "error";
        manifest["error"] = e.what();
        code = e.exit_code();
        log << "error: " << e.what() << "\n";
    }
    manifest["exit_code"] = code;
    manifest["artifacts"] = artifacts;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    return code;
}

// ---------------------------------------------------------------------------

namespace {

struct Checker {
    std::ostream& out;
    bool ok = true;
    void check(bool pass, const std::string& what, double value, double tol) {
        out << (pass ? "ok   " : "FAIL ") << what << ": " << num(value) << " (tol " << num(tol) << ")\n";
        ok = ok && pass;
    }
};

}  // namespace

int verify_run(const std::string& dir, std::ostream& out) {
    const fs::path d(dir);
    const json m = read_json(d / "manifest.json");
    const RunConfig c = config_from_manifest(m);
    validate(c);
    if (m.value("status", "") != "ok") {
        out << "FAIL run status: " << m.value("status", "?") << "\n";
        return 2;
    }
    const Setup S = make_setup(c);
    Checker ck{out};
    switch (c.scenario) {
        case Scenario::fluid: {
            auto load = [&](const std::string& tag, const std::string& f) {
                return read_specf((d / "snapshots" / ("fluid_" + tag + "_" + f + ".specf")).string(), S.grid);
            };
            for (const std::string tag : {"initial", "final"}) {
                const SpectralField u = load(tag, "u"), s = load(tag, "sigma");
                ck.check(divergence(u).norm_l2() <= 1e-10 * std::max(1.0, u.norm_l2()), tag + " div u",
                         divergence(u).norm_l2(), 1e-10);
                ck.check(std::abs(s.integral()) <= 1e-10, tag + " int sigma", std::abs(s.integral()), 1e-10);
            }
            const SpectralField u0 = load("initial", "u"), u1 = load("final", "u");
            const SpectralField t0 = load("initial", "theta"), t1 = load("final", "theta");
            double drift = std::abs(t1.integral() - t0.integral());
            for (int a = 0; a < 3; ++a) drift = std::max(drift, std::abs(u1.integral(a) - u0.integral(a)));
            ck.check(drift / c.t_final <= 1e-10, "conservation drift per unit time", drift / c.t_final, 1e-10);
            break;
        }
        case Scenario::hierarchy: {
            const ExpansionSet set = ExpansionSet::load((d / "expansion").string(), *S.model, S.grid);
            double worst = 0, b1 = 0, scale = 1e-300, bous = 0, div1 = 0;
            for (const auto& sn : set.snapshots) {
                const HierarchyResidual r = hierarchy_residual(sn.order1, sn.order2, *S.model);
                worst = std::max({worst, r.f1_kernel, r.g1_kernel, r.f2, r.g2, r.f3_hydro, r.g3_hydro, r.maxwell2});
                b1 = std::max(b1, sn.fields[0].B.norm_l2());
                scale = std::max({scale, sn.order1.u.norm_l2() + sn.order1.theta.norm_l2() + sn.order1.sigma.norm_l2()});
                const Moments mo = moments(sn.fields[0].f, sn.fields[0].g, *S.model);
                bous = std::max(bous, (mo.rho + mo.theta).norm_l2());
                div1 = std::max(div1, divergence(sn.order1.u).norm_l2());
            }
            ck.check(bous <= 1e-10 * std::max(1.0, scale), "Boussinesq rho1 + theta1", bous, 1e-10);
            ck.check(div1 <= 1e-10 * std::max(1.0, scale), "div u1", div1, 1e-10);
            ck.check(worst <= 1e-8 * std::max(1.0, scale), "max hierarchy residual", worst, 1e-8);
            ck.check(b1 == 0, "B1 = 0", b1, 0);
            break;
        }
        case Scenario::kinetic:
        case Scenario::inequality_audit: {
            for (double eps : c.epsilon_list) {
                const fs::path e = d / eps_tag(eps);
                const KineticState a = read_kin((e / "initial.kin").string(), S.grid);
                const KineticState b = read_kin((e / "final.kin").string(), S.grid);
                const std::string tag = eps_tag(eps) + " ";
                for (const auto* s : {&a, &b}) {
                    ck.check(gauss_E_residual(*s) <= 1e-8, tag + "Gauss E at t=" + num(s->t), gauss_E_residual(*s), 1e-8);
                    ck.check(gauss_B_residual(*s) <= 1e-8, tag + "Gauss B at t=" + num(s->t), gauss_B_residual(*s), 1e-8);
                    const double en = instant_energy(*s, c.N_energy, *S.space);
                    ck.check(std::isfinite(en) && en >= 0, tag + "E_N finite and nonnegative", en, 0);
                }
                const ConservationDrift dr = conservation_drift(conserved(a, *S.space), conserved(b, *S.space));
                const double w = std::max({dr.mass, dr.charge, dr.momentum, dr.energy}) / std::max(b.t - a.t, 1e-300);
                ck.check(w <= 1e-6, tag + "conservation drift per unit time", w, 1e-6);
            }
            break;
        }
        case Scenario::limit_sweep: {
            std::ifstream in(d / "convergence.csv");
            if (!in) throw IoError("missing convergence.csv");
            std::string line;
            std::getline(in, line);
            int rows = 0;
            while (std::getline(in, line)) {
                std::stringstream ss(line);
                std::string eps, e1, o1, e2;
                std::getline(ss, eps, ',');
                std::getline(ss, e1, ',');
                std::getline(ss, o1, ',');
                std::getline(ss, e2, ',');
                const double x1 = std::stod(e1), x2 = std::stod(e2);
                ck.check(std::isfinite(x1) && std::isfinite(x2) && x1 > 0 && x2 > 0,
                         "finite positive errors at epsilon " + eps, std::max(x1, x2), 0);
                ++rows;
            }
            ck.check(rows == int(c.epsilon_list.size()), "one row per epsilon", rows, double(c.epsilon_list.size()));
            break;
        }
    }
    out << (ck.ok ? "verify: ok\n" : "verify: FAILED\n");
    return ck.ok ? 0 : 2;
}

int emit_table(const std::string& dir, std::ostream& out) {
    const fs::path d(dir);
    std::ifstream in(d / "convergence.csv");
    if (!in) throw IoError("no convergence.csv in '" + dir + "' (run a limit_sweep first)");
    std::string line;
    std::getline(in, line);
    std::vector<LimitRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() < 4) throw IoError("malformed convergence.csv row: " + line);
        rows.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[3])});
    }
    const auto t = table_rows(rows);
    {
        Csv csv(d / "table.csv", table_header);
        for (const auto& r : t) csv.row_strings(r);
    }
    print_table(t, out);
    if (rows.size() >= 2) {
        std::vector<double> e, a, b;
        for (const auto& r : rows) {
            e.push_back(r.epsilon);
            a.push_back(r.err_order1);
            b.push_back(r.err_order2);
        }
        out << "fitted order (orders 1): " << num(fitted_order(e, a)) << "\n";
        out << "fitted order (orders 1..2): " << num(fitted_order(e, b)) << "\n";
    }
    return 0;
}

}  // namespace vmblab
