#include "vmblab/phase.hpp"

#include <cmath>

#include "vmblab/error.hpp"

namespace vmblab {

namespace {

SpectralField filtered(SpectralField f) {
    dealias_filter(f);
    return f;
}

// Pointwise map over physical samples of up to two phase fields and optional vectors.
template <class Fn>
SpectralField pointwise(const GridPtr& g, int K, const std::vector<const SpectralField*>& in, Fn fn) {
    std::vector<std::vector<double>> phys;
    phys.reserve(in.size());
    for (const SpectralField* f : in) phys.push_back(f ? filtered(*f).to_physical() : std::vector<double>{});
    const std::size_t N = g->size();
    std::vector<double> out(std::size_t(K) * N);
    Vec r(K);
    for (std::size_t x = 0; x < N; ++x) {
        fn(x, N, phys, r);
        for (int n = 0; n < K; ++n) out[n * N + x] = r[n];
    }
    SpectralField o = SpectralField::from_physical(g, K, out);
    dealias_filter(o);
    o.enforce_hermitian();
    return o;
}

Vec column(const std::vector<double>& p, std::size_t x, std::size_t N, int K) {
    Vec v(K);
    for (int n = 0; n < K; ++n) v[n] = p[n * N + x];
    return v;
}

}  // namespace

SpectralField phase_zero(const GridPtr& g, const HermiteSpace& S) { return SpectralField(g, S.size()); }

SpectralField phase_from_hydro(const SpectralField& rho, const SpectralField& u, const SpectralField& theta,
                               const HermiteSpace& S) {
    SpectralField F = phase_zero(rho.grid_ptr(), S);
    F.set_component(HermiteSpace::i0, rho);
    for (int i = 0; i < 3; ++i) {
        F.set_component(S.ie(i), u.component(i));
        F.set_component(S.i2e(i), (1.0 / std::sqrt(2.0)) * theta);
    }
    return F;
}

SpectralField phase_from_sigma(const SpectralField& sigma, const HermiteSpace& S) {
    SpectralField F = phase_zero(sigma.grid_ptr(), S);
    F.set_component(HermiteSpace::i0, sigma);
    return F;
}

SpectralField apply_velocity(const SpectralField& F, const Mat& A) {
    const int K = F.rank();
    const std::size_t N = F.grid().size();
    SpectralField out(F.grid_ptr(), K);
    for (int n = 0; n < K; ++n)
        for (int m = 0; m < K; ++m) {
            const double a = A(n, m);
            if (a == 0) continue;
            const cplx* src = F.data(m);
            cplx* dst = out.data(n);
            for (std::size_t i = 0; i < N; ++i) dst[i] += a * src[i];
        }
    return out;
}

SpectralField phase_transport(const SpectralField& F, const HermiteSpace& S) {
    SpectralField out(F.grid_ptr(), F.rank());
    for (int a = 0; a < 3; ++a) out += apply_velocity(derivative(F, a), S.V(a));
    return out;
}

SpectralField phase_gamma(const SpectralField& a, const SpectralField& b, const CollisionModel& C) {
    require_same_grid(a, b);
    const int K = C.space().size();
    return pointwise(a.grid_ptr(), K, {&a, &b},
                     [&](std::size_t x, std::size_t N, const std::vector<std::vector<double>>& p, Vec& r) {
                         r = C.gamma(column(p[0], x, N, K), column(p[1], x, N, K));
                     });
}

SpectralField phase_lorentz(const SpectralField& E, const SpectralField& B, const SpectralField& F,
                            const HermiteSpace& S) {
    const int K = S.size();
    const bool hasB = !B.empty();
    return pointwise(F.grid_ptr(), K, {&F, &E, hasB ? &B : nullptr},
                     [&](std::size_t x, std::size_t N, const std::vector<std::vector<double>>& p, Vec& r) {
                         const Vec fv = column(p[0], x, N, K);
                         r.setZero();
                         for (int a = 0; a < 3; ++a) {
                             r += p[1][a * N + x] * (S.D(a) * fv);
                             if (hasB) r += p[2][a * N + x] * (S.Omega(a) * fv);
                         }
                     });
}

SpectralField phase_field_drive(const SpectralField& E, const HermiteSpace& S) {
    SpectralField F = phase_zero(E.grid_ptr(), S);
    for (int i = 0; i < 3; ++i) F.set_component(S.ie(i), E.component(i));
    return F;
}

Mat p1_matrix(const HermiteSpace& S) {
    const int K = S.size();
    Mat P = Mat::Zero(K, K);
    P(0, 0) = 1;
    for (int i = 0; i < 3; ++i) {
        P(S.ie(i), S.ie(i)) = 1;
        for (int j = 0; j < 3; ++j) P(S.i2e(i), S.i2e(j)) = 1.0 / 3.0;
    }
    return P;
}

Mat p2_matrix(const HermiteSpace& S) {
    Mat P = Mat::Zero(S.size(), S.size());
    P(0, 0) = 1;
    return P;
}

SpectralField phase_micro_p1(const SpectralField& F, const HermiteSpace& S) {
    return apply_velocity(F, Mat::Identity(S.size(), S.size()) - p1_matrix(S));
}

SpectralField phase_micro_p2(const SpectralField& F, const HermiteSpace& S) {
    return apply_velocity(F, Mat::Identity(S.size(), S.size()) - p2_matrix(S));
}

namespace {

SpectralField invert_guarded(const SpectralField& H, const Mat& P, double nu0, const char* what) {
    const SpectralField ph = apply_velocity(H, P);
    if (ph.norm_l2() > 1e-10 * H.norm_l2())
        throw NotMicroscopic(std::string(what) + ": argument has a hydrodynamic component");
    return (1.0 / nu0) * H;
}

}  // namespace

SpectralField phase_invert_L(const SpectralField& H, const CollisionModel& C) {
    return invert_guarded(H, p1_matrix(C.space()), C.nu0(), "L^-1");
}

SpectralField phase_invert_cal_L(const SpectralField& H, const CollisionModel& C) {
    return invert_guarded(H, p2_matrix(C.space()), C.nu0(), "cal L^-1");
}

MomentVectors::MomentVectors(const HermiteSpace& S) {
    // Exact for polynomials of degree <= 2M + 3.
    Quadrature3 q(S.max_degree() + 3);
    const int K = S.size();
    one = Vec::Zero(K);
    energy = Vec::Zero(K);
    for (int i = 0; i < 3; ++i) {
        v[i] = Vec::Zero(K);
        heat[i] = Vec::Zero(K);
        for (int j = 0; j < 3; ++j) vv[i][j] = Vec::Zero(K);
    }
    for (std::size_t p = 0; p < q.nodes.size(); ++p) {
        const auto& x = q.nodes[p];
        const Vec h = q.weights[p] * S.poly_values(x);
        const double e = 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        one += h;
        energy += e * h;
        for (int i = 0; i < 3; ++i) {
            v[i] += x[i] * h;
            heat[i] += x[i] * e * h;
            for (int j = 0; j < 3; ++j) vv[i][j] += x[i] * x[j] * h;
        }
    }
}

SpectralField phase_moment(const SpectralField& F, const Vec& w) {
    const std::size_t N = F.grid().size();
    SpectralField out = SpectralField::scalar(F.grid_ptr());
    for (int n = 0; n < F.rank(); ++n) {
        if (std::abs(w[n]) < 1e-14) continue;
        const cplx* src = F.data(n);
        for (std::size_t i = 0; i < N; ++i) out.at(0, i) += w[n] * src[i];
    }
    return out;
}

SpectralField phase_vector_moment(const SpectralField& F, const std::array<Vec, 3>& w) {
    SpectralField out = SpectralField::vector(F.grid_ptr());
    for (int i = 0; i < 3; ++i) out.set_component(i, phase_moment(F, w[i]));
    return out;
}

}  // namespace vmblab
