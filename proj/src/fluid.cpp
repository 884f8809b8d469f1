#include "vmblab/fluid.hpp"

#include <cmath>
#include <functional>

#include "vmblab/error.hpp"

namespace vmblab {

namespace {

// e^z, phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2 for real z <= 0.
struct Phi {
    double e, p1, p2;
};

Phi phi_functions(double z) {
    if (std::abs(z) < 0.1) {
        double p1 = 0, p2 = 0, term = 1;
        // power series: p1 = sum z^k/(k+1)!, p2 = sum z^k/(k+2)!
        double f1 = 1, f2 = 0.5;
        for (int k = 0; k < 12; ++k) {
            p1 += term * f1;
            p2 += term * f2;
            term *= z;
            f1 /= (k + 2);
            f2 /= (k + 3);
        }
        return {std::exp(z), p1, p2};
    }
    const double e = std::exp(z);
    return {e, std::expm1(z) / z, (std::expm1(z) - z) / (z * z)};
}

// Per-mode factors for a diagonal decay rate lambda(k) >= 0 over a step dt.
struct ModeFactors {
    std::vector<Phi> f;
    ModeFactors(const Grid& g, double dt, const std::function<double(std::size_t)>& rate) {
        f.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = phi_functions(-dt * rate(i));
    }
};

// a = e y + dt phi1 N
SpectralField etd_predict(const SpectralField& y, const SpectralField& N, const ModeFactors& m, double dt) {
    SpectralField a(y.grid_ptr(), y.rank());
    const std::size_t n = y.grid().size();
    for (int c = 0; c < y.rank(); ++c)
        for (std::size_t i = 0; i < n; ++i)
            a.at(c, i) = m.f[i].e * y.at(c, i) + dt * m.f[i].p1 * N.at(c, i);
    return a;
}

// y+ = a + dt phi2 (Na - Ny)
void etd_correct(SpectralField& a, const SpectralField& Na, const SpectralField& Ny, const ModeFactors& m,
                 double dt) {
    const std::size_t n = a.grid().size();
    for (int c = 0; c < a.rank(); ++c)
        for (std::size_t i = 0; i < n; ++i) a.at(c, i) += dt * m.f[i].p2 * (Na.at(c, i) - Ny.at(c, i));
}

struct Explicit {
    SpectralField u, theta, sigma;
};

Explicit vnsf_explicit(const FluidState& s) {
    const SpectralField E = s.electric();
    SpectralField fu = advect(s.u, s.u) - dealias_product(s.sigma, E);
    Explicit n;
    n.u = -1.0 * leray_project(fu);
    n.theta = -1.0 * advect(s.u, s.theta);
    n.sigma = -1.0 * advect(s.u, s.sigma);
    return n;
}

void require_finite(const SpectralField& f, const char* what) {
    if (!f.all_finite()) throw NonFiniteState(std::string(what) + " has non-finite coefficients");
}

}  // namespace

FluidState FluidState::zero(const GridPtr& g) {
    return {SpectralField::vector(g), SpectralField::scalar(g), SpectralField::scalar(g), 0.0};
}

FluidState make_fluid_state(SpectralField u, SpectralField theta, SpectralField sigma, Corrections* corr) {
    require_same_grid(u, theta);
    require_same_grid(u, sigma);
    dealias_filter(u);
    dealias_filter(theta);
    dealias_filter(sigma);
    FluidState s;
    s.u = leray_project(u);
    s.theta = std::move(theta);
    s.sigma = std::move(sigma);
    const cplx m = s.sigma.mean();
    s.sigma.at(0, 0) = 0;
    if (corr) {
        corr->divergence = (u - s.u).norm_l2();
        corr->sigma_mean = std::abs(m);
    }
    return s;
}

FluidRates vnsf_rhs(const FluidState& s, const Transport& tc) {
    Explicit n = vnsf_explicit(s);
    FluidRates r;
    r.du = n.u.axpy(tc.eta, laplacian(s.u));
    r.dtheta = n.theta.axpy(tc.kappa, laplacian(s.theta));
    r.dsigma = n.sigma.axpy(tc.alpha, laplacian(s.sigma)).axpy(-tc.alpha, s.sigma);
    return r;
}

double fluid_cfl(const FluidState& s, double dt) {
    const auto& g = s.u.grid();
    const std::vector<double> u = s.u.to_physical();
    const std::size_t N = g.size();
    double m = 0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(u[i]) + std::abs(u[N + i]) + std::abs(u[2 * N + i]));
    return dt * m * g.n() / (2.0 * pi);
}

void step_nonlinear_vnsf(FluidState& s, double dt, const Transport& tc) {
    if (fluid_cfl(s, dt) > 1.0) throw CflViolation("advective CFL number exceeds 1");
    const Grid& g = s.u.grid();
    ModeFactors fu(g, dt, [&](std::size_t i) { return tc.eta * g.ksq(i); });
    ModeFactors ft(g, dt, [&](std::size_t i) { return tc.kappa * g.ksq(i); });
    ModeFactors fs(g, dt, [&](std::size_t i) { return tc.alpha * (g.ksq(i) + 1.0); });

    const Explicit n0 = vnsf_explicit(s);
    FluidState a;
    a.u = etd_predict(s.u, n0.u, fu, dt);
    a.theta = etd_predict(s.theta, n0.theta, ft, dt);
    a.sigma = etd_predict(s.sigma, n0.sigma, fs, dt);
    a.t = s.t + dt;
    const Explicit n1 = vnsf_explicit(a);
    etd_correct(a.u, n1.u, n0.u, fu, dt);
    etd_correct(a.theta, n1.theta, n0.theta, ft, dt);
    etd_correct(a.sigma, n1.sigma, n0.sigma, fs, dt);
    a.sigma.at(0, 0) = 0;
    for (auto* f : {&a.u, &a.theta, &a.sigma}) {
        dealias_filter(*f);
        f->enforce_hermitian();
    }
    require_finite(a.u, "u");
    require_finite(a.theta, "theta");
    require_finite(a.sigma, "sigma");
    s = std::move(a);
}

SpectralField compute_pressure(const FluidState& s) {
    const SpectralField force = dealias_product(s.sigma, s.electric()) - advect(s.u, s.u);
    return inverse_laplacian_zero_mean(divergence(force));
}

// ---------------------------------------------------------------------------

LinearVNSFState LinearVNSFState::zero(const GridPtr& g) {
    LinearVNSFState x;
    x.u = SpectralField::vector(g);
    x.theta = SpectralField::scalar(g);
    x.sigma = SpectralField::scalar(g);
    return x;
}

LinearVNSFSources LinearVNSFSources::zero(const GridPtr& g) {
    LinearVNSFSources s;
    s.R_u = SpectralField::vector(g);
    s.R_sigma = SpectralField::scalar(g);
    s.R_theta = SpectralField::scalar(g);
    s.dtE_prev = SpectralField::vector(g);
    s.dtB_prev = SpectralField::vector(g);
    s.current = SpectralField::vector(g);
    return s;
}

SpectralField electric_m(const LinearVNSFState& x, const LinearVNSFSources& src) {
    SpectralField d = x.sigma;
    d.at(0, 0) = 0;
    return helmholtz_solve(-1.0 * src.dtB_prev, d, x.e_mean);
}

SpectralField magnetic_m(const LinearVNSFSources& src) {
    return helmholtz_solve(src.current + src.dtE_prev, SpectralField::scalar(src.current.grid_ptr()), {0, 0, 0},
                           src.current.norm_l2() + src.dtE_prev.norm_l2());
}

namespace {

struct LinearExplicit {
    SpectralField u, theta, sigma;
    std::array<double, 3> e;
};

LinearExplicit linear_explicit(const LinearVNSFState& x, const FluidState& bg, const LinearVNSFSources& src) {
    const SpectralField E1 = bg.electric();
    const SpectralField Em = electric_m(x, src);
    SpectralField mom = advect(bg.u, x.u) + advect(x.u, bg.u) - dealias_product(bg.sigma, Em) -
                        dealias_product(x.sigma, E1) - src.R_u;
    LinearExplicit n;
    n.u = -1.0 * leray_project(mom);
    n.sigma = src.R_sigma - advect(bg.u, x.sigma) - advect(x.u, bg.sigma);
    n.theta = src.R_theta - advect(bg.u, x.theta) - advect(x.u, bg.theta);
    n.e = src.ell;
    return n;
}

}  // namespace

LinearRates linear_vnsf_rhs(const LinearVNSFState& x, const FluidState& bg, const LinearVNSFSources& src,
                            const Transport& tc) {
    LinearExplicit n = linear_explicit(x, bg, src);
    LinearRates r;
    r.du = n.u.axpy(tc.eta, laplacian(x.u));
    r.dtheta = n.theta.axpy(tc.kappa, laplacian(x.theta));
    r.dsigma = n.sigma.axpy(tc.alpha, laplacian(x.sigma)).axpy(-tc.alpha, x.sigma);
    for (int a = 0; a < 3; ++a) r.de[a] = n.e[a] - tc.alpha * x.e_mean[a];
    return r;
}

void step_linear_vnsf(LinearVNSFState& x, double dt, const FluidState& bg0, const LinearVNSFSources& src0,
                      const FluidState& bg1, const LinearVNSFSources& src1, const Transport& tc) {
    const Grid& g = x.u.grid();
    ModeFactors fu(g, dt, [&](std::size_t i) { return tc.eta * g.ksq(i); });
    ModeFactors ft(g, dt, [&](std::size_t i) { return tc.kappa * g.ksq(i); });
    ModeFactors fs(g, dt, [&](std::size_t i) { return tc.alpha * (g.ksq(i) + 1.0); });
    const Phi pe = phi_functions(-dt * tc.alpha);

    const LinearExplicit n0 = linear_explicit(x, bg0, src0);
    LinearVNSFState a;
    a.u = etd_predict(x.u, n0.u, fu, dt);
    a.theta = etd_predict(x.theta, n0.theta, ft, dt);
    a.sigma = etd_predict(x.sigma, n0.sigma, fs, dt);
    for (int c = 0; c < 3; ++c) a.e_mean[c] = pe.e * x.e_mean[c] + dt * pe.p1 * n0.e[c];
    a.t = x.t + dt;
    const LinearExplicit n1 = linear_explicit(a, bg1, src1);
    etd_correct(a.u, n1.u, n0.u, fu, dt);
    etd_correct(a.theta, n1.theta, n0.theta, ft, dt);
    etd_correct(a.sigma, n1.sigma, n0.sigma, fs, dt);
    for (int c = 0; c < 3; ++c) a.e_mean[c] += dt * pe.p2 * (n1.e[c] - n0.e[c]);
    for (auto* f : {&a.u, &a.theta, &a.sigma}) {
        dealias_filter(*f);
        f->enforce_hermitian();
        require_finite(*f, "order-m field");
    }
    x = std::move(a);
}

}  // namespace vmblab
