#pragma once

#include <array>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/kinetic.hpp"
#include "vmblab/phase.hpp"

namespace vmblab {

// f1 = (rho1, u1, theta1) sqrt(mu) with rho1 = -theta1, g1 = sigma1 sqrt(mu),
// E1 = grad phi1, B1 = 0.
OrderFields build_first_order(const FluidState& s1, const HermiteSpace& S);

// Time derivative of the first order, from the fluid rates.
OrderFields first_order_rate(const FluidState& s1, const FluidRates& r1, const HermiteSpace& S);

struct SecondOrderMicro {
    SpectralField f, g;  // (I - P1) f2 and (I - P2) g2
};
SecondOrderMicro build_second_order_micro(const FluidState& s1, const CollisionModel& C);

// d/dt (I - P1) f2 given the first order and its rate.
SpectralField second_order_micro_f_rate(const FluidState& s1, const FluidRates& r1, const CollisionModel& C);

// Order-2 pieces fixed by the first order at one instant.
struct SecondOrderKnown {
    double t = 0;
    SecondOrderMicro micro;
    SpectralField beta;       // rho2 + theta2 for k != 0 (zero mean)
    SpectralField dbeta;      // its time derivative
    SpectralField u_comp;     // (I - P0) u2 = grad inv-Laplacian d(theta1)/dt
    SpectralField current;    // j2
    SpectralField dtE1;       // d E1 / dt
};

// Pressure-like potential rho2 + theta2 (k != 0) from the micro part of f2.
SpectralField second_order_beta(const FluidState& s1, const SpectralField& f2_micro, const MomentVectors& mv);

enum class TimeDerivative { analytic, finite_difference };

// Uses the last history entry (analytic) or the centred difference around the
// middle of the last three equally spaced entries (finite_difference).
SecondOrderKnown second_order_known(const std::vector<FluidState>& history, const CollisionModel& C,
                                    TimeDerivative mode = TimeDerivative::analytic);

// Order-2 fields for unknowns x = (P0 u2, theta2, sigma2, mean E2).
OrderFields assemble_second_order(const FluidState& s1, const SecondOrderKnown& k, const LinearVNSFState& x,
                                  const CollisionModel& C);

struct ThirdOrderMicro {
    SpectralField f, g;  // (I - P1) f3 and (I - P2) g3
};
ThirdOrderMicro build_third_order_micro(const FluidState& s1, const OrderFields& o2, const CollisionModel& C);

// Generic order-2 evolution: time derivative of (P0 u2, theta2, sigma2, mean E2)
// computed from the order-3 micro parts.
LinearRates second_order_rhs(const FluidState& s1, const SecondOrderKnown& k, const LinearVNSFState& x,
                             const CollisionModel& C);

// Sources of the linear order-2 system: every term that does not involve the
// order-2 unknowns.
LinearVNSFSources assemble_R2_sources(const FluidState& s1, const SecondOrderKnown& k, const CollisionModel& C);
LinearVNSFSources assemble_R2_sources(const std::vector<FluidState>& history, const CollisionModel& C,
                                      TimeDerivative mode = TimeDerivative::analytic);

struct SecondOrderInit {
    std::array<double, 3> e_mean{0, 0, 0};  // mean of E2 at t = 0
};

// Initial order-2 unknowns: P0 u2 = 0, sigma2 = 0, theta2 constant with
// (3/2) int theta2 = -(1/2) int |E1|^2.
LinearVNSFState initial_second_order(const FluidState& s1, const SecondOrderInit& init = {});

struct ExpansionSnapshot {
    double t = 0;
    FluidState order1;
    LinearVNSFState order2;
    std::vector<OrderFields> fields;  // fields[m-1] = order m
};

struct ExpansionSet {
    int n_max = 2;
    std::vector<ExpansionSnapshot> snapshots;

    std::string provenance;  // JSON text describing the generating run

    // Snapshot with time closest to t.
    const ExpansionSnapshot& at(double t) const;
    // manifest.json plus one .specf file per stored field.
    void save(const std::string& dir, const CollisionModel& C) const;
    // Rebuilds order1/order2 from the stored fields.
    static ExpansionSet load(const std::string& dir, const CollisionModel& C, GridPtr grid = nullptr);
};

// L2 norms of the hierarchy equations at orders eps^1..eps^3 (the last only
// through its hydrodynamic projections, which are the first-order fluid equations).
struct HierarchyResidual {
    double f1_kernel = 0, g1_kernel = 0;  // L f1, cal_L g1
    double f2 = 0, g2 = 0;                // v.grad f1 + L f2 - Gamma(f1, f1), and the g analogue
    double f3_hydro = 0, g3_hydro = 0;    // P1 / P2 of the eps^3 equations
    double maxwell2 = 0;                  // curl B2 - dE1/dt - j2
};
HierarchyResidual hierarchy_residual(const FluidState& s1, const LinearVNSFState& x2, const CollisionModel& C);

ExpansionSnapshot make_snapshot(const FluidState& s1, const LinearVNSFState& x2, const CollisionModel& C, int n_max);

// Lockstep integration of the first-order fluid and the order-2 linear system.
// Stores a snapshot every `record_every` steps and at the final time.
ExpansionSet build_full_second_order(const FluidState& s1_init, const CollisionModel& C, double dt, int steps,
                                     int record_every, int n_max = 2, SecondOrderInit init = {});

}  // namespace vmblab
