#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vmblab/error.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/init.hpp"

using namespace vmblab;

namespace {

const Transport unit_tc{1.0, 1.0, 1.0};

double state_diff(const FluidState& a, const FluidState& b) {
    return (a.u - b.u).norm_l2() + (a.theta - b.theta).norm_l2() + (a.sigma - b.sigma).norm_l2();
}

FluidState run(FluidState s, double dt, double T, const Transport& tc) {
    const int steps = int(std::lround(T / dt));
    for (int i = 0; i < steps; ++i) step_nonlinear_vnsf(s, dt, tc);
    return s;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
    auto g = make_grid(8);
    auto s = FluidState::zero(g);
    s = run(s, 1e-2, 0.1, unit_tc);
    CHECK(s.u.norm_l2() == 0.0);
    CHECK(compute_pressure(s).norm_l2() == 0.0);
}

TEST_CASE("shear flow decays as exp(-eta t)") {
    auto g = make_grid(8);
    for (double eta : {1.0, 0.5}) {
        Transport tc{eta, 1.0, 1.0};
        auto s = initial_fluid("shear", 0.3, 0, g);
        s = run(s, 1e-3, 1.0, tc);
        auto ref = SpectralField::sample_vector(g, [&](double, double y, double) {
            return std::array<double, 3>{0.3 * std::exp(-eta) * std::sin(y), 0, 0};
        });
        CHECK((s.u - ref).norm_l2() / ref.norm_l2() < 1e-6);
        CHECK(compute_pressure(s).norm_l2() < 1e-14);
    }
}

TEST_CASE("sigma mode decays as exp(-2 alpha t)") {
    auto g = make_grid(8);
    for (double alpha : {1.0, 0.5}) {
        Transport tc{1.0, 1.0, alpha};
        auto s0 = make_fluid_state(SpectralField::vector(g), SpectralField::scalar(g),
                                   SpectralField::sample(g, [](double x, double, double) { return 0.2 * std::sin(x); }));
        auto s = run(s0, 1e-3, 1.0, tc);
        const double rate = -std::log(s.sigma.norm_l2() / s0.sigma.norm_l2());
        CHECK(std::abs(rate - 2 * alpha) / (2 * alpha) < 1e-3);
        CHECK((s.sigma - std::exp(-2 * alpha) * s0.sigma).norm_l2() / s.sigma.norm_l2() < 1e-6);
        CHECK(s.u.norm_l2() < 1e-15);
    }
}

TEST_CASE("second-order temporal convergence") {
    auto g = make_grid(8);
    auto s0 = initial_fluid("taylor_green_like", 0.8, 0, g);
    const double T = 0.5;
    auto ref = run(s0, 0.5 / 640, T, unit_tc);
    double e[3];
    const double dts[3] = {0.5 / 20, 0.5 / 40, 0.5 / 80};
    for (int i = 0; i < 3; ++i) e[i] = state_diff(run(s0, dts[i], T, unit_tc), ref);
    const double p1 = std::log2(e[0] / e[1]), p2 = std::log2(e[1] / e[2]);
    MESSAGE("fluid temporal orders " << p1 << " " << p2);
    CHECK(p1 >= 1.9);
    CHECK(p2 >= 1.9);
}

TEST_CASE("invariants and conservation along a nonlinear run") {
    auto g = make_grid(8);
    auto s = initial_fluid("random_small", 0.5, 7, g);
    const auto m0u = s.u.coeffs()[0];
    const double m0t = s.theta.mean().real();
    for (int i = 0; i < 100; ++i) {
        step_nonlinear_vnsf(s, 1e-2, unit_tc);
        CHECK(divergence(s.u).norm_l2() < 1e-12);
    }
    CHECK(std::abs(s.u.coeffs()[0] - m0u) * box_volume < 1e-10);
    CHECK(std::abs(s.theta.mean().real() - m0t) * box_volume < 1e-10);
    CHECK(std::abs(s.sigma.mean()) * box_volume < 1e-10);
}

TEST_CASE("CFL guard") {
    auto g = make_grid(8);
    auto s = initial_fluid("shear", 10.0, 0, g);
    CHECK_THROWS_AS(step_nonlinear_vnsf(s, 0.5, unit_tc), CflViolation);
}

TEST_CASE("pressure recovers the gradient part of the forcing") {
    auto g = make_grid(8);
    auto s = initial_fluid("random_small", 0.5, 3, g);
    auto force = dealias_product(s.sigma, s.electric()) - advect(s.u, s.u);
    auto p = compute_pressure(s);
    CHECK((gradient(p) - (force - leray_project(force))).norm_l2() < 1e-11 * (1 + force.norm_l2()));
    // Projected momentum residual: du/dt = eta Lap u + force - grad p.
    auto r = vnsf_rhs(s, unit_tc);
    auto resid = r.du - laplacian(s.u) - force + gradient(p);
    CHECK(resid.norm_l2() < 1e-10);
}

TEST_CASE("linear system: Helmholtz reconstruction and mean ODE") {
    auto g = make_grid(8);
    auto x = LinearVNSFState::zero(g);
    auto src = LinearVNSFSources::zero(g);
    auto bg = FluidState::zero(g);
    step_linear_vnsf(x, 1e-2, bg, src, bg, src, unit_tc);
    CHECK(x.u.norm_l2() == 0.0);
    CHECK(electric_m(x, src).norm_l2() == 0.0);
    CHECK(magnetic_m(src).norm_l2() == 0.0);

    x.sigma = SpectralField::sample(g, [](double x1, double, double) { return std::sin(x1); });
    auto E = electric_m(x, src);
    auto ref = gradient(inverse_laplacian_zero_mean(x.sigma));
    CHECK((E - ref).norm_l2() < 1e-12);
    auto refc = SpectralField::sample_vector(g, [](double x1, double, double) {
        return std::array<double, 3>{-std::cos(x1), 0, 0};
    });
    CHECK((E - refc).norm_l2() < 1e-12);

    auto y = LinearVNSFState::zero(g);
    const std::array<double, 3> e0{0.3, -0.1, 0.2}, c{0.05, 0.1, -0.2};
    y.e_mean = e0;
    src.ell = c;
    for (double alpha : {1.0, 0.5}) {
        Transport tc{1.0, 1.0, alpha};
        auto z = y;
        for (int i = 0; i < 1000; ++i) step_linear_vnsf(z, 1e-3, bg, src, bg, src, tc);
        for (int a = 0; a < 3; ++a) {
            const double ex = e0[a] * std::exp(-alpha) + c[a] / alpha * (1 - std::exp(-alpha));
            CHECK(std::abs(z.e_mean[a] - ex) < 1e-8);
        }
    }
}

TEST_CASE("linear system matches finite-difference linearization of the nonlinear one") {
    // With zero sources, m-th order fields solve the linearization about the background.
    auto g = make_grid(8);
    auto bg = initial_fluid("taylor_green_like", 0.5, 0, g);
    auto pert = initial_fluid("random_small", 1.0, 5, g);
    const double h = 1e-6;
    auto plus = bg, minus = bg;
    plus.u.axpy(h, pert.u);
    plus.theta.axpy(h, pert.theta);
    plus.sigma.axpy(h, pert.sigma);
    minus.u.axpy(-h, pert.u);
    minus.theta.axpy(-h, pert.theta);
    minus.sigma.axpy(-h, pert.sigma);
    auto rp = vnsf_rhs(plus, unit_tc), rm = vnsf_rhs(minus, unit_tc);
    LinearVNSFState x = LinearVNSFState::zero(g);
    x.u = pert.u;
    x.theta = pert.theta;
    x.sigma = pert.sigma;
    auto lr = linear_vnsf_rhs(x, bg, LinearVNSFSources::zero(g), unit_tc);
    CHECK(((1.0 / (2 * h)) * (rp.du - rm.du) - lr.du).norm_l2() < 1e-7);
    CHECK(((1.0 / (2 * h)) * (rp.dtheta - rm.dtheta) - lr.dtheta).norm_l2() < 1e-7);
    CHECK(((1.0 / (2 * h)) * (rp.dsigma - rm.dsigma) - lr.dsigma).norm_l2() < 1e-7);
}

TEST_CASE("initializers") {
    auto g = make_grid(8);
    auto a = initial_fluid("random_small", 0.01, 42, g);
    auto b = initial_fluid("random_small", 0.01, 42, g);
    CHECK(a.u.coeffs() == b.u.coeffs());
    CHECK(a.sigma.coeffs() == b.sigma.coeffs());
    CHECK(divergence(a.u).norm_l2() < 1e-14);
    CHECK(std::abs(a.sigma.mean()) < 1e-15);
    CHECK(std::abs(dealias_dot(a.u, a.u).mean()) > 0);
    // parity: integral of sigma u vanishes.
    auto su = dealias_product(a.sigma, a.u);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(su.at(c, 0)) < 1e-18);
    auto sh = initial_fluid("shear", 0.2, 0, g);
    CHECK(std::abs(sh.u.at(0, g->index_of(0, 1, 0)) - cplx(0, -0.1)) < 1e-14);
    CHECK_THROWS_AS(initial_fluid("vortex", 0.1, 0, g), UnknownInitializer);
}
