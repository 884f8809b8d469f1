#include "vmblab/collision.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vmblab/error.hpp"
#include "vmblab/spectral.hpp"

namespace vmblab {

std::string to_string(FrequencyMode m) {
    return m == FrequencyMode::constant ? "constant" : "hard_sphere";
}

FrequencyMode frequency_mode_from_string(const std::string& s) {
    if (s == "constant") return FrequencyMode::constant;
    if (s == "hard_sphere") return FrequencyMode::hard_sphere;
    throw ConfigInvalid("unknown frequency_mode '" + s + "'");
}

double hard_sphere_frequency(double r) {
    const double c = std::sqrt(2.0 / pi);
    if (r < 1e-6) return 2.0 * c + c * r * r / 3.0;
    return c * std::exp(-0.5 * r * r) + (r + 1.0 / r) * std::erf(r / std::sqrt(2.0));
}

CollisionModel::CollisionModel(std::shared_ptr<const HermiteSpace> space, double nu0, FrequencyMode mode)
    : space_(std::move(space)), nu0_(nu0), mode_(mode) {
    if (!(nu0_ > 0)) throw ConfigInvalid("nu0 must be positive");
    build_gamma_tensor();
    build_weights();
    compute_transport();
}

Hydro CollisionModel::hydro(const Vec& f) const {
    const auto& S = *space_;
    Hydro h;
    h.rho = f[HermiteSpace::i0];
    for (int i = 0; i < 3; ++i) h.u[i] = f[S.ie(i)];
    h.theta = std::sqrt(2.0) / 3.0 * (f[S.i2e(0)] + f[S.i2e(1)] + f[S.i2e(2)]);
    return h;
}

Vec CollisionModel::from_hydro(const Hydro& h) const {
    const auto& S = *space_;
    Vec f = S.zero();
    f[HermiteSpace::i0] = h.rho;
    for (int i = 0; i < 3; ++i) {
        f[S.ie(i)] = h.u[i];
        f[S.i2e(i)] = h.theta / std::sqrt(2.0);
    }
    return f;
}

Vec CollisionModel::project_p1(const Vec& f) const { return from_hydro(hydro(f)); }

Vec CollisionModel::project_p2(const Vec& g) const {
    Vec p = space_->zero();
    p[HermiteSpace::i0] = g[HermiteSpace::i0];
    return p;
}

namespace {

void require_micro(const Vec& h, const Vec& ph, const char* op) {
    if (ph.norm() > 1e-10 * h.norm() && ph.norm() > 1e-300)
        throw NotMicroscopic(std::string(op) + ": right-hand side has a hydrodynamic component");
}

}  // namespace

Vec CollisionModel::invert_L_micro(const Vec& h) const {
    require_micro(h, project_p1(h), "invert_L_micro");
    return micro_p1(h) / nu0_;
}

Vec CollisionModel::invert_cal_L_micro(const Vec& h) const {
    require_micro(h, project_p2(h), "invert_cal_L_micro");
    return micro_p2(h) / nu0_;
}

// Second-order term of M[F]/mu for F = mu + eps sqrt(mu) f, as a function of the
// hydrodynamic field h = (rho, u, theta) of f: phi2 + phi1^2 / 2.
static double maxwellian_quadratic(const std::array<double, 5>& h, const std::array<double, 3>& v) {
    const double rho = h[0], th = h[4];
    const double vu = v[0] * h[1] + v[1] * h[2] + v[2] * h[3];
    const double u2 = h[1] * h[1] + h[2] * h[2] + h[3] * h[3];
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double phi1 = rho + vu + 0.5 * th * (v2 - 3.0);
    const double phi2 = -0.5 * rho * rho + 1.5 * rho * th + 0.75 * th * th - (rho + th) * vu -
                        0.5 * (th * th + rho * th + u2 / 3.0) * v2;
    return phi2 + 0.5 * phi1 * phi1;
}

void CollisionModel::build_gamma_tensor() {
    const auto& S = *space_;
    const int K = S.size();
    T_.assign(K, Mat::Zero(5, 5));
    Quadrature3 q(S.max_degree() + 3);
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
        const auto& v = q.nodes[a];
        const Vec hv = S.poly_values(v);
        Eigen::Matrix<double, 5, 5> B;
        std::array<double, 5> ep{}, epq{};
        for (int p = 0; p < 5; ++p) {
            ep.fill(0);
            ep[p] = 1;
            B(p, p) = maxwellian_quadratic(ep, v);
        }
        for (int p = 0; p < 5; ++p)
            for (int r = p + 1; r < 5; ++r) {
                epq.fill(0);
                epq[p] = epq[r] = 1;
                B(p, r) = B(r, p) = 0.5 * (maxwellian_quadratic(epq, v) - B(p, p) - B(r, r));
            }
        for (int n = 0; n < K; ++n) T_[n] += (q.weights[a] * hv[n]) * B;
    }
}

Vec CollisionModel::quadratic_hydro(const std::array<double, 5>& ha, const std::array<double, 5>& hb) const {
    const int K = space_->size();
    Eigen::Map<const Eigen::Matrix<double, 5, 1>> a(ha.data()), b(hb.data());
    Vec out(K);
    for (int n = 0; n < K; ++n) out[n] = a.dot(T_[n] * b);
    return out;
}

Vec CollisionModel::gamma(const Vec& a, const Vec& b) const {
    const double a0 = a[HermiteSpace::i0], b0 = b[HermiteSpace::i0];
    Vec out = a0 * project_p1(b) - b0 * a;
    out += quadratic_hydro(hydro(a).packed(), hydro(b).packed());
    return nu0_ * out;
}

void CollisionModel::build_weights() {
    const auto& S = *space_;
    const int K = S.size();
    if (mode_ == FrequencyMode::constant) {
        W_ = nu0_ * Mat::Identity(K, K);
    } else {
        W_ = Mat::Zero(K, K);
    }
    Mat A = Mat::Zero(K, K);
    Quadrature3 q(2 * S.max_degree() + 16);
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
        const auto& v = q.nodes[a];
        const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        const Vec hv = S.poly_values(v);
        const Mat outer = q.weights[a] * hv * hv.transpose();
        A += (1.0 + r) * outer;
        if (mode_ == FrequencyMode::hard_sphere) W_ += hard_sphere_frequency(r) * outer;
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, W_);
    weight_C_ = std::sqrt(es.eigenvalues().maxCoeff());
}

double CollisionModel::nu_weighted_norm(const Vec& f) const { return std::sqrt(f.dot(W_ * f)); }

void CollisionModel::compute_transport() {
    // Chapman-Enskog integrals on the micro parts of v_i v_j sqrt(mu) and
    // v_i |v|^2/2 sqrt(mu); the moment vectors are built by quadrature.
    const auto& S = *space_;
    const int K = S.size();
    Quadrature3 q(S.max_degree() + 4);
    std::array<std::array<Vec, 3>, 3> A;
    std::array<Vec, 3> Bv, Cv;
    for (int i = 0; i < 3; ++i) {
        Bv[i] = Vec::Zero(K);
        Cv[i] = Vec::Zero(K);
        for (int j = 0; j < 3; ++j) A[i][j] = Vec::Zero(K);
    }
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
        const auto& v = q.nodes[a];
        const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        const Vec hv = q.weights[a] * S.poly_values(v);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[i][j] += v[i] * v[j] * hv;
            Bv[i] += 0.5 * v[i] * v2 * hv;
            Cv[i] += v[i] * hv;
        }
    }
    double eta = 0, kappa = 0, alpha = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const Vec m = micro_p1(A[i][j]);
            eta += invert_L_micro(m).dot(m);
        }
        const Vec b = micro_p1(Bv[i]);
        kappa += invert_L_micro(b).dot(b);
        alpha += invert_cal_L_micro(Cv[i]).dot(Cv[i]);
    }
    transport_.eta = eta / 10.0;
    transport_.kappa = 2.0 * kappa / 15.0;
    transport_.alpha = alpha / 3.0;
}

}  // namespace vmblab
