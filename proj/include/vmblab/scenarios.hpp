#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "vmblab/diagnostics.hpp"
#include "vmblab/expansion.hpp"

namespace vmblab {

// Worker count: VMBLAB_THREADS if set (>= 1), else the hardware concurrency.
int worker_threads();
// Runs fn(0..n-1) on up to worker_threads() threads; rethrows the first failure.
void parallel_for(int n, const std::function<void(int)>& fn);

struct FluidSample {
    double t = 0;
    double u_h2 = 0, theta_h2 = 0, sigma_h2 = 0;
    std::array<double, 3> int_u{0, 0, 0};
    double int_theta = 0, int_sigma = 0;
    double norm_sum() const { return u_h2 + theta_h2 + sigma_h2; }
};
FluidSample fluid_sample(const FluidState& s);

// Nonlinear first-order fluid run; samples every `sample_every` steps and at the end.
std::vector<FluidSample> run_fluid(FluidState s, const Transport& tc, double dt, double t_final, int sample_every,
                                   FluidState* final_state = nullptr);

// Kinetic data from the expansion at t = 0: lift of orders 1..orders, then the
// k = 0 corrections that zero the conserved quantities.
KineticState kinetic_initial_data(const FluidState& s1, const CollisionModel& C, double eps, int orders,
                                  double* correction = nullptr);

struct KineticSample {
    EnergyReport report;
    double gauss_E = 0, gauss_B = 0;
};

struct KineticRun {
    double epsilon = 0, dt = 0;
    KineticState initial, final;
    std::vector<KineticSample> samples;
    // Macroscopic-equation residuals from the last three steps, centered at macroscopic_t.
    std::map<std::string, double> macroscopic;
    double macroscopic_t = 0;
};

// Steps count = round(t_final / dt), with dt adjusted to land on t_final.
KineticRun run_kinetic(const KineticState& init, std::shared_ptr<const CollisionModel> model, double dt,
                       double t_final, int N, int sample_every, const LyapunovEnergy* lyap = nullptr);

struct EnergyAudit {
    std::size_t violations_plain = 0, violations_lyap = 0;
    double worst_plain = 0, worst_lyap = 0;  // max (dE/dt + D) / E(0), 0 when none is positive
    double sup_plain = 0, sup_lyap = 0;      // sup_t E / E(0)
    bool has_lyap = false;
    // Decay fits of the plain and the Lyapunov energy: polynomial k = 1, 2 and exponential.
    DecayFit plain_poly1, plain_poly2, plain_exp, lyap_poly1, lyap_poly2, lyap_exp;
    bool fitted = false;
};
EnergyAudit audit_energy(const std::vector<EnergyReport>& reports, double tol_rel);

// L2 error of the kinetic moments (rho, u, theta, sigma) against
// eps * order 1 + eps^2 * order 2 (the latter when n = 2).
double limit_error(const KineticState& k, const ExpansionSnapshot& snap, int n, const CollisionModel& C);

struct LimitRow {
    double epsilon = 0;
    double err_order1 = 0, err_order2 = 0;
};

// Hierarchy to t_final with step dt; per epsilon a kinetic run with step dt * eps
// from each lift (orders 1 and 1..2). Epsilons run in parallel.
std::vector<LimitRow> limit_sweep(const FluidState& s1, std::shared_ptr<const CollisionModel> model,
                                  const std::vector<double>& eps, double dt, double t_final);

// log(e_i / e_{i+1}) / log(eps_i / eps_{i+1}).
double observed_order(double eps_a, double err_a, double eps_b, double err_b);
// Least-squares slope of log err against log eps.
double fitted_order(const std::vector<double>& eps, const std::vector<double>& err);

}  // namespace vmblab
