#include "vmblab/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "vmblab/error.hpp"

namespace vmblab {

int worker_threads() {
    if (const char* env = std::getenv("VMBLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigInvalid("VMBLAB_THREADS: must be a positive integer");
        return int(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int w = std::min(n, worker_threads());
    if (w <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (int i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

FluidSample fluid_sample(const FluidState& s) {
    FluidSample r;
    r.t = s.t;
    r.u_h2 = s.u.norm_h(2);
    r.theta_h2 = s.theta.norm_h(2);
    r.sigma_h2 = s.sigma.norm_h(2);
    for (int a = 0; a < 3; ++a) r.int_u[a] = s.u.integral(a);
    r.int_theta = s.theta.integral();
    r.int_sigma = s.sigma.integral();
    return r;
}

namespace {
int step_count(double dt, double t_final) {
    if (!(dt > 0)) throw ConfigInvalid("dt: must be positive");
    if (!(t_final > 0)) throw ConfigInvalid("t_final: must be positive");
    return std::max(1, int(std::lround(t_final / dt)));
}
}  // namespace

std::vector<FluidSample> run_fluid(FluidState s, const Transport& tc, double dt, double t_final, int sample_every,
                                   FluidState* final_state) {
    const int steps = step_count(dt, t_final);
    const double h = t_final / steps;
    std::vector<FluidSample> out{fluid_sample(s)};
    for (int i = 1; i <= steps; ++i) {
        step_nonlinear_vnsf(s, h, tc);
        if (i % sample_every == 0 || i == steps) out.push_back(fluid_sample(s));
    }
    if (final_state) *final_state = s;
    return out;
}

KineticState kinetic_initial_data(const FluidState& s1, const CollisionModel& C, double eps, int orders,
                                  double* correction) {
    if (orders < 1 || orders > 2) throw OrderMismatch("kinetic initial data use orders 1 or 1..2");
    const ExpansionSnapshot snap = make_snapshot(s1, initial_second_order(s1), C, orders);
    KineticState k = lift_expansion(snap.fields, eps, s1.u.grid_ptr(), C.space());
    const double c = enforce_conservation_constraints(k, C.space());
    if (correction) *correction = c;
    return k;
}

KineticRun run_kinetic(const KineticState& init, std::shared_ptr<const CollisionModel> model, double dt,
                       double t_final, int N, int sample_every, const LyapunovEnergy* lyap) {
    const int steps = step_count(dt, t_final);
    KineticRun r;
    r.epsilon = init.epsilon;
    r.dt = t_final / steps;
    r.initial = init;
    const KineticStepper st(init.f.grid_ptr(), model, init.epsilon, r.dt);
    KineticState s = init;
    auto sample = [&] {
        KineticSample k;
        k.report = energy_report(s, N, *model, lyap);
        k.gauss_E = gauss_E_residual(s);
        k.gauss_B = gauss_B_residual(s);
        r.samples.push_back(std::move(k));
    };
    sample();
    std::vector<KineticState> tail;
    for (int i = 1; i <= steps; ++i) {
        st.step(s);
        if (i % sample_every == 0 || i == steps) sample();
        if (i + 3 > steps) tail.push_back(s);
    }
    if (tail.size() == 3) {
        r.macroscopic = macroscopic_residuals(tail, *model);
        r.macroscopic_t = tail[1].t;
    }
    r.final = std::move(s);
    return r;
}

EnergyAudit audit_energy(const std::vector<EnergyReport>& rep, double tol_rel) {
    EnergyAudit a;
    if (rep.empty()) return a;
    a.has_lyap = rep.front().E_lyap >= 0;
    const double e0 = rep.front().E_N, l0 = rep.front().E_lyap;
    auto scan = [&](bool lyap, std::size_t& count, double& worst, double& sup) {
        const double ref = lyap ? l0 : e0;
        for (const auto& r : rep) sup = std::max(sup, ref > 0 ? (lyap ? r.E_lyap : r.E_N) / ref : 0.0);
        if (rep.size() < 3) return;
        const auto v = energy_inequality_monitor(rep, tol_rel, 0, lyap);
        count = v.size();
        for (const auto& x : v) worst = std::max(worst, ref > 0 ? x.value / ref : x.value);
    };
    scan(false, a.violations_plain, a.worst_plain, a.sup_plain);
    if (a.has_lyap) scan(true, a.violations_lyap, a.worst_lyap, a.sup_lyap);
    std::vector<double> t, e, l;
    bool positive = true;
    for (const auto& r : rep) {
        t.push_back(r.t);
        e.push_back(r.E_N);
        l.push_back(r.E_lyap);
        positive = positive && r.E_N > 0 && (!a.has_lyap || r.E_lyap > 0);
    }
    if (positive && rep.size() >= 10) {
        a.fitted = true;
        a.plain_poly1 = fit_decay(t, e, DecayKind::polynomial, 1);
        a.plain_poly2 = fit_decay(t, e, DecayKind::polynomial, 2);
        a.plain_exp = fit_decay(t, e, DecayKind::exponential);
        if (a.has_lyap) {
            a.lyap_poly1 = fit_decay(t, l, DecayKind::polynomial, 1);
            a.lyap_poly2 = fit_decay(t, l, DecayKind::polynomial, 2);
            a.lyap_exp = fit_decay(t, l, DecayKind::exponential);
        }
    }
    return a;
}

double limit_error(const KineticState& k, const ExpansionSnapshot& snap, int n, const CollisionModel& C) {
    if (n < 1 || n > int(snap.fields.size())) throw OrderMismatch("snapshot lacks the requested orders");
    const double eps = k.epsilon;
    const Moments m = moments(k, C);
    const Moments a = moments(snap.fields[0].f, snap.fields[0].g, C);
    Moments b;
    if (n == 2) b = moments(snap.fields[1].f, snap.fields[1].g, C);
    auto err = [&](const SpectralField& x, const SpectralField& x1, const SpectralField* x2) {
        SpectralField d = x;
        d.axpy(-eps, x1);
        if (x2) d.axpy(-eps * eps, *x2);
        return std::pow(d.norm_l2(), 2);
    };
    const bool two = n == 2;
    return std::sqrt(err(m.rho, a.rho, two ? &b.rho : nullptr) + err(m.u, a.u, two ? &b.u : nullptr) +
                     err(m.theta, a.theta, two ? &b.theta : nullptr) + err(m.sigma, a.sigma, two ? &b.sigma : nullptr));
}

std::vector<LimitRow> limit_sweep(const FluidState& s1, std::shared_ptr<const CollisionModel> model,
                                  const std::vector<double>& eps, double dt, double t_final) {
    const int steps = step_count(dt, t_final);
    const ExpansionSet set = build_full_second_order(s1, *model, t_final / steps, steps, steps);
    const ExpansionSnapshot& s0 = set.snapshots.front();
    const ExpansionSnapshot& sT = set.snapshots.back();
    std::vector<LimitRow> rows(eps.size());
    parallel_for(int(eps.size()) * 2, [&](int job) {
        const int i = job / 2, n = 1 + job % 2;
        std::vector<OrderFields> ord(s0.fields.begin(), s0.fields.begin() + n);
        KineticState k = lift_expansion(ord, eps[i], s1.u.grid_ptr(), model->space());
        enforce_conservation_constraints(k, model->space());
        const int ks = step_count(dt * eps[i], t_final);
        const KineticStepper st(k.f.grid_ptr(), model, eps[i], t_final / ks);
        for (int j = 0; j < ks; ++j) st.step(k);
        const double e = limit_error(k, sT, n, *model);
        rows[i].epsilon = eps[i];
        (n == 1 ? rows[i].err_order1 : rows[i].err_order2) = e;
    });
    return rows;
}

double observed_order(double eps_a, double err_a, double eps_b, double err_b) {
    return std::log(err_a / err_b) / std::log(eps_a / eps_b);
}

double fitted_order(const std::vector<double>& eps, const std::vector<double>& err) {
    if (eps.size() != err.size() || eps.size() < 2) throw TooFewSamples("order fit needs two or more points");
    double mx = 0, my = 0;
    const double n = double(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        mx += std::log(eps[i]) / n;
        my += std::log(err[i]) / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double dx = std::log(eps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(err[i]) - my);
    }
    return sxy / sxx;
}

}  // namespace vmblab
