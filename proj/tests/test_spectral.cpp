#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "vmblab/error.hpp"
#include "vmblab/spectral.hpp"

using namespace vmblab;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("coefficients follow exp(i k.x) on [-pi, pi]^3") {
    auto g = make_grid(8);
    auto f = SpectralField::sample(g, [](double x, double, double) { return std::cos(x); });
    CHECK(std::abs(f.at(0, g->index_of(1, 0, 0)) - cplx(0.5)) < 1e-14);
    CHECK(std::abs(f.at(0, g->index_of(-1, 0, 0)) - cplx(0.5)) < 1e-14);
    auto s = SpectralField::sample(g, [](double, double y, double) { return std::sin(2 * y); });
    CHECK(std::abs(s.at(0, g->index_of(0, 2, 0)) - cplx(0, -0.5)) < 1e-14);
    auto c = SpectralField::sample(g, [](double, double, double) { return 3.0; });
    CHECK(std::abs(c.mean() - cplx(3.0)) < 1e-14);
    CHECK(c.integral() == doctest::Approx(3.0 * box_volume));
}

TEST_CASE("round trip and Parseval") {
    auto g = make_grid(8);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> v(g->size());
    for (auto& x : v) x = nd(rng);
    auto f = SpectralField::from_physical(g, 1, v);
    CHECK(max_diff(f.to_physical(), v) < 1e-13);
    double s = 0;
    for (double x : v) s += x * x;
    CHECK(f.norm_l2() * f.norm_l2() == doctest::Approx(s * box_volume / g->size()).epsilon(1e-12));
    CHECK(f.hermitian_defect() < 1e-14);
}

TEST_CASE("derivatives against analytic forms") {
    auto g = make_grid(16);
    auto f = SpectralField::sample(g, [](double x, double y, double z) {
        return std::sin(x) * std::cos(2 * y) + std::sin(3 * z);
    });
    auto dx = SpectralField::sample(g, [](double x, double y, double) {
        return std::cos(x) * std::cos(2 * y);
    });
    auto dy = SpectralField::sample(g, [](double x, double y, double) {
        return -2 * std::sin(x) * std::sin(2 * y);
    });
    CHECK((derivative(f, 0) - dx).norm_l2() < 1e-12);
    CHECK((derivative(f, 1) - dy).norm_l2() < 1e-12);
    auto lap = SpectralField::sample(g, [](double x, double y, double z) {
        return -5 * std::sin(x) * std::cos(2 * y) - 9 * std::sin(3 * z);
    });
    CHECK((laplacian(f) - lap).norm_l2() < 1e-11);
    CHECK((inverse_laplacian_zero_mean(lap) - f).norm_l2() < 1e-12);
}

TEST_CASE("Nyquist mode has zero first derivative") {
    auto g = make_grid(8);
    auto f = SpectralField::sample(g, [](double x, double, double) { return std::cos(4 * x); });
    CHECK(derivative(f, 0).norm_l2() < 1e-14);
    CHECK(laplacian(f).norm_l2() == doctest::Approx(16 * f.norm_l2()));
}

TEST_CASE("inverse Laplacian rejects nonzero mean") {
    auto g = make_grid(8);
    auto f = SpectralField::sample(g, [](double x, double, double) { return 1 + std::cos(x); });
    CHECK_THROWS_AS(inverse_laplacian_zero_mean(f), NonZeroMean);
}

TEST_CASE("Leray projection") {
    auto g = make_grid(8);
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> v(3 * g->size());
    for (auto& x : v) x = nd(rng);
    auto u = SpectralField::from_physical(g, 3, v);
    auto pu = leray_project(u);
    CHECK(divergence(pu).norm_l2() < 1e-12);
    CHECK((leray_project(pu) - pu).norm_l2() < 1e-12);
    auto phi = SpectralField::sample(g, [](double x, double y, double z) {
        return std::sin(x + 2 * y) * std::cos(z);
    });
    CHECK(leray_project(gradient(phi)).norm_l2() < 1e-12);
}

TEST_CASE("curl and Helmholtz") {
    auto g = make_grid(8);
    auto a = SpectralField::sample_vector(g, [](double x, double, double) {
        return std::array<double, 3>{0, 0, std::sin(x)};
    });
    auto expected = SpectralField::sample_vector(g, [](double x, double, double) {
        return std::array<double, 3>{0, -std::cos(x), 0};
    });
    CHECK((curl(a) - expected).norm_l2() < 1e-13);
    auto w = SpectralField::sample_vector(g, [](double x, double y, double z) {
        return std::array<double, 3>{std::sin(y) * std::cos(z), std::sin(2 * x + z), std::cos(x - y)};
    });
    CHECK(divergence(curl(w)).norm_l2() < 1e-12);

    // X = w_perp + grad phi + mean; recover from curl, div, mean.
    auto phi = SpectralField::sample(g, [](double x, double y, double) { return std::cos(x) * std::sin(y); });
    auto X = leray_project(w) + gradient(phi);
    for (int c = 0; c < 3; ++c) X.at(c, 0) = 0.25 * (c + 1);
    auto Y = helmholtz_solve(curl(X), divergence(X), {0.25, 0.5, 0.75});
    CHECK((X - Y).norm_l2() < 1e-12);
    auto bad = SpectralField::sample_vector(g, [](double x, double, double) {
        return std::array<double, 3>{std::sin(x), 0, 0};
    });
    CHECK_THROWS_AS(helmholtz_solve(bad, divergence(X), {0, 0, 0}), IncompatibleSources);
}

TEST_CASE("dealiased products") {
    auto g = make_grid(8);
    auto s = SpectralField::sample(g, [](double x, double, double) { return std::sin(x); });
    auto s2 = SpectralField::sample(g, [](double x, double, double) { return 0.5 - 0.5 * std::cos(2 * x); });
    CHECK((dealias_product(s, s) - s2).norm_l2() < 1e-14);

    // Direct truncated convolution oracle.
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    std::vector<double> va(g->size()), vb(g->size());
    for (auto& x : va) x = nd(rng);
    for (auto& x : vb) x = nd(rng);
    auto a = SpectralField::from_physical(g, 1, va);
    auto b = SpectralField::from_physical(g, 1, vb);
    auto p = dealias_product(a, b);
    double err = 0;
    for (std::size_t m : g->resolved_modes()) {
        auto km = g->wavevector(m);
        cplx acc = 0;
        for (std::size_t i : g->resolved_modes()) {
            auto ki = g->wavevector(i);
            int q[3] = {km[0] - ki[0], km[1] - ki[1], km[2] - ki[2]};
            if (std::abs(q[0]) > 2 || std::abs(q[1]) > 2 || std::abs(q[2]) > 2) continue;
            acc += a.at(0, i) * b.at(0, g->index_of(q[0], q[1], q[2]));
        }
        err = std::max(err, std::abs(acc - p.at(0, m)));
    }
    CHECK(err < 1e-13);
    for (std::size_t i = 0; i < g->size(); ++i)
        if (!g->resolved(i)) CHECK(p.at(0, i) == cplx(0));

    auto u = SpectralField::sample_vector(g, [](double, double y, double) {
        return std::array<double, 3>{std::sin(y), 0, 0};
    });
    auto f = SpectralField::sample(g, [](double x, double, double) { return std::cos(x); });
    auto adv = SpectralField::sample(g, [](double x, double y, double) { return -std::sin(x) * std::sin(y); });
    CHECK((advect(u, f) - adv).norm_l2() < 1e-14);
}

TEST_CASE("specf round trip") {
    auto g = make_grid(8);
    auto w = SpectralField::sample_vector(g, [](double x, double y, double z) {
        return std::array<double, 3>{std::sin(y), std::cos(x + z), 0.3};
    });
    const std::string path = "test_spectral_roundtrip.specf";
    write_specf(path, w);
    auto r = read_specf(path);
    CHECK(r.rank() == 3);
    CHECK((r - w).norm_l2() == 0.0);
    std::remove(path.c_str());
    auto g16 = make_grid(16);
    CHECK_THROWS_AS(SpectralField(g16, 1) + w, GridMismatch);
}
