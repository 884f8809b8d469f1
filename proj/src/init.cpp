#include "vmblab/init.hpp"

#include <cmath>
#include <random>

#include "vmblab/error.hpp"

namespace vmblab {

namespace {

// Portable uniform draw in [-1, 1) from the raw 64-bit stream.
double uniform_pm1(std::mt19937_64& rng) { return 2.0 * double(rng() >> 11) * 0x1.0p-53 - 1.0; }

void scale_to(SpectralField& f, double amplitude) {
    const double m = f.max_abs();
    if (m > 0) f *= amplitude / m;
}

}  // namespace

const std::vector<std::string>& initializer_names() {
    static const std::vector<std::string> names{"shear", "taylor_green_like", "single_mode_sigma", "random_small"};
    return names;
}

FluidState initial_fluid(const std::string& name, double A, std::uint64_t seed, const GridPtr& g,
                         Corrections* corr) {
    SpectralField u = SpectralField::vector(g), theta = SpectralField::scalar(g), sigma = SpectralField::scalar(g);
    if (name == "shear") {
        u = SpectralField::sample_vector(g, [A](double, double y, double) {
            return std::array<double, 3>{A * std::sin(y), 0.0, 0.0};
        });
    } else if (name == "taylor_green_like") {
        u = SpectralField::sample_vector(g, [A](double x, double y, double z) {
            return std::array<double, 3>{A * std::sin(x) * std::cos(y) * std::cos(z),
                                         -A * std::cos(x) * std::sin(y) * std::cos(z), 0.0};
        });
        theta = SpectralField::sample(g, [A](double x, double, double z) { return 0.5 * A * std::cos(x + z); });
        sigma = SpectralField::sample(g, [A](double, double y, double z) { return 0.5 * A * std::cos(y) * std::cos(z); });
    } else if (name == "single_mode_sigma") {
        sigma = SpectralField::sample(g, [A](double x, double, double) { return A * std::cos(x); });
    } else if (name == "random_small") {
        std::mt19937_64 rng(seed);
        const std::size_t N = g->size();
        const int n = g->n();
        std::vector<double> pu(3 * N, 0.0), pt(N, 0.0), ps(N, 0.0);
        // One representative per +-k pair, visited in a fixed order.
        for (int k0 = 0; k0 <= 2; ++k0)
            for (int k1 = -2; k1 <= 2; ++k1)
                for (int k2 = -2; k2 <= 2; ++k2) {
                    if (k0 * k0 + k1 * k1 + k2 * k2 > 4 || k0 * k0 + k1 * k1 + k2 * k2 == 0) continue;
                    if (k0 == 0 && (k1 < 0 || (k1 == 0 && k2 < 0))) continue;
                    const double at = uniform_pm1(rng), as = uniform_pm1(rng);
                    std::array<double, 3> b{uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng)};
                    for (int i0 = 0; i0 < n; ++i0)
                        for (int i1 = 0; i1 < n; ++i1)
                            for (int i2 = 0; i2 < n; ++i2) {
                                const double ph = k0 * g->coordinate(i0) + k1 * g->coordinate(i1) + k2 * g->coordinate(i2);
                                const std::size_t idx = g->index(i0, i1, i2);
                                const double c = std::cos(ph), s = std::sin(ph);
                                pt[idx] += at * c;
                                ps[idx] += as * c;
                                for (int a = 0; a < 3; ++a) pu[a * N + idx] += b[a] * s;
                            }
                }
        u = leray_project(SpectralField::from_physical(g, 3, pu));
        theta = SpectralField::from_physical(g, 1, pt);
        sigma = SpectralField::from_physical(g, 1, ps);
        scale_to(u, A);
        scale_to(theta, A);
        scale_to(sigma, A);
    } else {
        throw UnknownInitializer("no initializer named '" + name + "'");
    }
    return make_fluid_state(std::move(u), std::move(theta), std::move(sigma), corr);
}

}  // namespace vmblab
