#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/kinetic.hpp"

namespace vmblab {

struct EnergyTerms {
    double hydro_f = 0, hydro_g = 0, micro_f = 0, micro_g = 0, field_E = 0, field_B = 0;
    double total() const { return hydro_f + hydro_g + micro_f + micro_g + field_E + field_B; }
};

// Largest derivative order accepted on a grid: n/2.
int max_energy_order(const Grid& g);

// Sum over |gamma| <= N of spatial derivative norms of f, g, E, B; velocity
// derivatives act on the micro parts through the degree weights
// W_j(n) = sum_{i<=j} (1 + |n|)^i with j = N - |gamma|.
double instant_energy(const KineticState& s, int N, const HermiteSpace& S, EnergyTerms* terms = nullptr);

// Hydro parts with weight 1, micro parts nu-weighted with the same degree weights and a
// factor 1/eps^2. The field entries of `terms` are zero.
double dissipation_rate(const KineticState& s, int N, const CollisionModel& C, EnergyTerms* terms = nullptr);

// Equivalent instant energy built mode by mode from the Lyapunov equation of the
// linear generator: d/dt E = -D_N exactly for the linearized flow on states that
// satisfy the Gauss constraints and have no mean hydro part. Directions that the
// linear flow conserves (k = 0 hydro parts of f, mean charge, mean B) keep their
// plain weight; D_N still counts the first two, so there the identity is lost.
class LyapunovEnergy {
public:
    LyapunovEnergy(GridPtr grid, std::shared_ptr<const CollisionModel> model, double epsilon, int N);
    double operator()(const KineticState& s) const;
    // Bounds c_lo, c_hi with c_lo * instant_energy <= E <= c_hi * instant_energy on
    // constraint-satisfying states.
    double lower_constant() const { return c_lo_; }
    double upper_constant() const { return c_hi_; }

private:
    GridPtr grid_;
    std::shared_ptr<const CollisionModel> model_;
    double eps_;
    int N_;
    std::vector<std::size_t> modes_;
    std::vector<Eigen::MatrixXcd> Hf_, Hg_;  // Hg acts on (g, E, B)
    double c_lo_ = 1, c_hi_ = 1;
};

struct EnergyReport {
    double t = 0;
    int N = 0;
    double E_N = 0, D_N = 0;
    double E_lyap = -1;  // negative when not computed
    EnergyTerms energy_terms, dissipation_terms;
    Conserved conservation;
    std::map<std::string, double> macroscopic_residuals;
};

EnergyReport energy_report(const KineticState& s, int N, const CollisionModel& C,
                           const LyapunovEnergy* lyap = nullptr);

struct Violation {
    std::size_t interval = 0;  // between reports i and i + 1
    double t = 0;              // interval midpoint
    double value = 0;          // dE/dt + D
    double tolerance = 0;
};

// Per interval: (E_{i+1} - E_{i-1}) / (t_{i+1} - t_{i-1}) + D_i at interior samples.
// use_lyapunov selects E_lyap instead of E_N.
std::vector<Violation> energy_inequality_monitor(const std::vector<EnergyReport>& reports, double tol_rel,
                                                 double tol_abs, bool use_lyapunov = false);

enum class DecayKind { exponential, polynomial };

struct DecayFit {
    double rate = 0;      // exponential: v ~ C e^{-rate t}; polynomial: v ~ C (1 + t/k)^{-rate}
    double constant = 0;  // C
    double residual = 0;  // RMS of the log misfit over the range of log v
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v, DecayKind kind, double k = 1);

// Per-equation L2 residuals of the local conservation laws and the macroscopic
// equations, with d/dt from the centred difference of three equally spaced
// states (prev, cur, next). The model of the kinetic solver supplies the
// nonlinear terms. Keys: cons_a, cons_b, cons_c, cons_d, c, bi, bij, ai, a, d, e.
std::map<std::string, double> macroscopic_residuals(const std::vector<KineticState>& levels,
                                                    const CollisionModel& C);

struct ConservationDrift {
    double mass = 0, charge = 0, momentum = 0, energy = 0;
};
ConservationDrift conservation_drift(const Conserved& a, const Conserved& b);

}  // namespace vmblab
