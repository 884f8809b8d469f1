#pragma once

#include <array>
#include <memory>
#include <string>

#include "vmblab/hermite.hpp"

namespace vmblab {

enum class FrequencyMode { constant, hard_sphere };

std::string to_string(FrequencyMode m);
FrequencyMode frequency_mode_from_string(const std::string& s);

// Hydrodynamic field (rho, u, theta) of f, with
// P1 f = (rho + u.v + theta (|v|^2 - 3)/2) sqrt(mu).
struct Hydro {
    double rho = 0;
    std::array<double, 3> u{0, 0, 0};
    double theta = 0;
    std::array<double, 5> packed() const { return {rho, u[0], u[1], u[2], theta}; }
};

struct Transport {
    double eta = 0, kappa = 0, alpha = 0;
};

// Hard-sphere collision frequency nu(|v|) = int |v - w| mu(w) dw.
double hard_sphere_frequency(double r);

// Relaxation model: L = nu0 (I - P1), cal_L = nu0 (I - P2), and Gamma the quadratic
// part of the density-weighted local-Maxwellian relaxation.
class CollisionModel {
public:
    CollisionModel(std::shared_ptr<const HermiteSpace> space, double nu0 = 1.0,
                   FrequencyMode mode = FrequencyMode::constant);

    const HermiteSpace& space() const { return *space_; }
    std::shared_ptr<const HermiteSpace> space_ptr() const { return space_; }
    double nu0() const { return nu0_; }
    FrequencyMode mode() const { return mode_; }

    Hydro hydro(const Vec& f) const;
    Vec from_hydro(const Hydro& h) const;
    Vec project_p1(const Vec& f) const;
    double sigma(const Vec& g) const { return g[HermiteSpace::i0]; }
    Vec project_p2(const Vec& g) const;
    Vec micro_p1(const Vec& f) const { return f - project_p1(f); }
    Vec micro_p2(const Vec& g) const { return g - project_p2(g); }

    Vec apply_L(const Vec& f) const { return nu0_ * micro_p1(f); }
    Vec apply_cal_L(const Vec& g) const { return nu0_ * micro_p2(g); }
    // Throw NotMicroscopic unless |P h| <= 1e-10 |h|.
    Vec invert_L_micro(const Vec& h) const;
    Vec invert_cal_L_micro(const Vec& h) const;

    Vec gamma(const Vec& a, const Vec& b) const;
    Vec gamma_sym(const Vec& a, const Vec& b) const { return 0.5 * (gamma(a, b) + gamma(b, a)); }
    // Quadratic hydro term K(a, b)_n = sum_pq T[n](p, q) h_a[p] h_b[q].
    Vec quadratic_hydro(const std::array<double, 5>& ha, const std::array<double, 5>& hb) const;

    const Transport& transport() const { return transport_; }

    double nu_weighted_norm(const Vec& f) const;
    // Weight matrix of the nu-norm on coefficients.
    const Mat& nu_weight() const { return W_; }
    // Smallest C with |(1 + |v|)^{1/2} f| <= C |f|_nu on the truncated space.
    double weight_constant() const { return weight_C_; }

private:
    std::shared_ptr<const HermiteSpace> space_;
    double nu0_;
    FrequencyMode mode_;
    std::vector<Mat> T_;  // one 5x5 symmetric block per mode
    Transport transport_;
    Mat W_;
    double weight_C_ = 0;

    void build_gamma_tensor();
    void build_weights();
    void compute_transport();
};

}  // namespace vmblab
