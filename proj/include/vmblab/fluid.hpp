#pragma once

#include <array>

#include "vmblab/collision.hpp"
#include "vmblab/spectral.hpp"

namespace vmblab {

// First-order fluid fields. rho = -theta is implied and never stored.
struct FluidState {
    SpectralField u, theta, sigma;
    double t = 0;

    static FluidState zero(const GridPtr& g);
    SpectralField phi() const { return inverse_laplacian_zero_mean(sigma); }
    // E = grad phi, zero mean.
    SpectralField electric() const { return gradient(phi()); }
};

struct FluidRates {
    SpectralField du, dtheta, dsigma;
};

struct Corrections {
    double divergence = 0;  // L2 norm removed by the Leray projection
    double sigma_mean = 0;  // mean removed from sigma
};

// Leray-projects u, removes the mean of sigma, filters to the resolved band.
FluidState make_fluid_state(SpectralField u, SpectralField theta, SpectralField sigma,
                            Corrections* corr = nullptr);

// Full time derivative of the nonlinear system.
FluidRates vnsf_rhs(const FluidState& s, const Transport& tc);

double fluid_cfl(const FluidState& s, double dt);

// One exponential-integrator RK2 step: diffusion and damping exact per mode,
// advection and the sigma grad(phi) force explicit and dealiased.
void step_nonlinear_vnsf(FluidState& s, double dt, const Transport& tc);

// Zero-mean p with Laplacian p = div(sigma grad phi - u.grad u).
SpectralField compute_pressure(const FluidState& s);

// Order-m linear system for (P0 u_m, theta_m, sigma_m) and the mean of E_m.
struct LinearVNSFState {
    SpectralField u, theta, sigma;
    std::array<double, 3> e_mean{0, 0, 0};
    double t = 0;

    static LinearVNSFState zero(const GridPtr& g);
};

struct LinearVNSFSources {
    SpectralField R_u, R_sigma, R_theta;
    std::array<double, 3> ell{0, 0, 0};
    SpectralField dtE_prev, dtB_prev;  // time derivatives of E_{m-1}, B_{m-1}
    SpectralField current;             // j_m, the v-moment of (I - P2) g_m

    static LinearVNSFSources zero(const GridPtr& g);
};

struct LinearRates {
    SpectralField du, dtheta, dsigma;
    std::array<double, 3> de{0, 0, 0};
};

// curl E_m = -dB_{m-1}/dt, div E_m = sigma_m, mean E_m = e_mean.
SpectralField electric_m(const LinearVNSFState& x, const LinearVNSFSources& src);
// curl B_m = j_m + dE_{m-1}/dt, div B_m = 0, mean B_m = 0.
SpectralField magnetic_m(const LinearVNSFSources& src);

LinearRates linear_vnsf_rhs(const LinearVNSFState& x, const FluidState& bg, const LinearVNSFSources& src,
                            const Transport& tc);

// Advances x from bg0.t to bg1.t; background and sources are supplied at both ends.
void step_linear_vnsf(LinearVNSFState& x, double dt, const FluidState& bg0, const LinearVNSFSources& src0,
                      const FluidState& bg1, const LinearVNSFSources& src1, const Transport& tc);

}  // namespace vmblab
