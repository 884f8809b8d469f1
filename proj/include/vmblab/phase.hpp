#pragma once

#include <array>

#include "vmblab/collision.hpp"
#include "vmblab/spectral.hpp"

namespace vmblab {

// Helpers for phase-space fields: SpectralFields with one component per Hermite mode.

SpectralField phase_zero(const GridPtr& g, const HermiteSpace& S);
// (rho + u.v + theta (|v|^2 - 3)/2) sqrt(mu)
SpectralField phase_from_hydro(const SpectralField& rho, const SpectralField& u, const SpectralField& theta,
                               const HermiteSpace& S);
SpectralField phase_from_sigma(const SpectralField& sigma, const HermiteSpace& S);

// Pointwise velocity-space linear map, applied mode by mode.
SpectralField apply_velocity(const SpectralField& F, const Mat& A);
// v . grad_x F, truncated at degree M.
SpectralField phase_transport(const SpectralField& F, const HermiteSpace& S);
// Gamma(a, b) pointwise, dealiased.
SpectralField phase_gamma(const SpectralField& a, const SpectralField& b, const CollisionModel& C);
// (E + v x B).grad_v acting on sqrt(mu) F, divided by sqrt(mu); dealiased. B may be empty.
SpectralField phase_lorentz(const SpectralField& E, const SpectralField& B, const SpectralField& F,
                            const HermiteSpace& S);
// (E . v) sqrt(mu)
SpectralField phase_field_drive(const SpectralField& E, const HermiteSpace& S);

Mat p1_matrix(const HermiteSpace& S);
Mat p2_matrix(const HermiteSpace& S);
SpectralField phase_micro_p1(const SpectralField& F, const HermiteSpace& S);
SpectralField phase_micro_p2(const SpectralField& F, const HermiteSpace& S);
// Microscopic inverses with the NotMicroscopic guard applied to the whole field.
SpectralField phase_invert_L(const SpectralField& H, const CollisionModel& C);
SpectralField phase_invert_cal_L(const SpectralField& H, const CollisionModel& C);

// Velocity moments <F, m(v) sqrt(mu)> for fixed weight vectors.
struct MomentVectors {
    Vec one;
    std::array<Vec, 3> v;                     // v_i
    std::array<std::array<Vec, 3>, 3> vv;     // v_i v_j
    std::array<Vec, 3> heat;                  // v_i |v|^2 / 2
    Vec energy;                               // |v|^2 / 2
    explicit MomentVectors(const HermiteSpace& S);
};
SpectralField phase_moment(const SpectralField& F, const Vec& w);
SpectralField phase_vector_moment(const SpectralField& F, const std::array<Vec, 3>& w);

}  // namespace vmblab
