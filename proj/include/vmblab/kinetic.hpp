#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/spectral.hpp"

namespace vmblab {

// Raw fluctuations f = (F - mu)/sqrt(mu), g = G/sqrt(mu) stored as rank-K spectral
// fields (one component per Hermite mode), plus the electromagnetic field.
struct KineticState {
    SpectralField f, g, E, B;
    double epsilon = 1.0;
    double t = 0;

    static KineticState zero(const GridPtr& grid, const HermiteSpace& space, double epsilon);
    const Grid& grid() const { return f.grid(); }
    int modes() const { return f.rank(); }
};

// One order of the expansion: (f_m, g_m, E_m, B_m).
struct OrderFields {
    SpectralField f, g, E, B;
};

struct Moments {
    SpectralField rho, u, theta, sigma;
};

Moments moments(const KineticState& s, const CollisionModel& model);
Moments moments(const SpectralField& f, const SpectralField& g, const CollisionModel& model);

// Charge density <g, sqrt(mu)> and current <g, v sqrt(mu)>.
SpectralField charge(const SpectralField& g);
SpectralField current(const SpectralField& g, const HermiteSpace& space);

// |div E - <g, sqrt mu>| and |div B| in L2.
double gauss_E_residual(const KineticState& s);
double gauss_B_residual(const KineticState& s);

struct Conserved {
    double mass = 0, charge = 0;
    std::array<double, 3> momentum{0, 0, 0};  // int int v F + int E x B
    double energy = 0;                         // int int |v|^2 (F - mu) + int |E|^2 + |B|^2
};
Conserved conserved(const KineticState& s, const HermiteSpace& space);

// Adjusts the k = 0 hydrodynamic coefficients so that all conserved quantities vanish.
// Returns the size of the change.
double enforce_conservation_constraints(KineticState& s, const HermiteSpace& space);

KineticState lift_expansion(const std::vector<OrderFields>& orders, double epsilon, const GridPtr& grid,
                            const HermiteSpace& space);

// eps^{-n} (state - sum_{m<n} eps^m order_m).
OrderFields remainder(const KineticState& s, const std::vector<OrderFields>& orders, int n);

struct StepperOptions {
    // Drop the plasma coupling (E.v sqrt(mu) source and current) to isolate the Maxwell block.
    bool vacuum = false;
};

// Exponential RK2 in time: per resolved Fourier mode, the linear part (transport,
// relaxation, Maxwell and the E.v sqrt(mu) / current coupling) is applied through
// its exact matrix exponential and phi functions; the Lorentz and Gamma terms
// are explicit and dealiased.
class KineticStepper {
public:
    KineticStepper(GridPtr grid, std::shared_ptr<const CollisionModel> model, double epsilon, double dt,
                   StepperOptions opt = {});

    double epsilon() const { return eps_; }
    double dt() const { return dt_; }
    const CollisionModel& model() const { return *model_; }

    void step(KineticState& s) const;

    // Explicit right-hand side for (f, g) (fields carry no explicit term).
    void explicit_terms(const KineticState& s, SpectralField& Nf, SpectralField& Ng) const;
    // Full time derivative of the state.
    KineticState rhs(const KineticState& s) const;
    // Lorentz speed bound used by the CFL and epsilon checks.
    double lorentz_rate(const KineticState& s) const;

    // Per-mode linear generators (before multiplication by dt).
    Eigen::MatrixXcd f_generator(const std::array<int, 3>& k) const;
    Eigen::MatrixXcd g_generator(const std::array<int, 3>& k) const;

private:
    struct Block {
        Eigen::MatrixXcd e, p1, p2;
    };
    GridPtr grid_;
    std::shared_ptr<const CollisionModel> model_;
    double eps_, dt_;
    StepperOptions opt_;
    std::vector<std::size_t> modes_;  // resolved modes with conj index >= idx
    std::vector<Block> fblk_, gblk_;
};

// Linear generators of one Fourier mode: f block (K) and (g, E, B) block (K + 6).
Eigen::MatrixXcd kinetic_f_generator(const std::array<int, 3>& k, const CollisionModel& model, double eps);
Eigen::MatrixXcd kinetic_g_generator(const std::array<int, 3>& k, const CollisionModel& model, double eps,
                                     bool vacuum = false);

// Convenience wrapper that keeps the most recent stepper.
void step_vmb(KineticState& s, double dt, std::shared_ptr<const CollisionModel> model);

// e^Z, phi1(Z), phi2(Z) by Taylor expansion and doubling.
void matrix_phi(const Eigen::MatrixXcd& Z, Eigen::MatrixXcd& e, Eigen::MatrixXcd& p1, Eigen::MatrixXcd& p2);

void write_kin(const std::string& path, const KineticState& s, int max_degree);
KineticState read_kin(const std::string& path, GridPtr grid = nullptr);

}  // namespace vmblab
