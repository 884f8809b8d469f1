#include "vmblab/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vmblab/error.hpp"
#include "vmblab/spectral.hpp"

namespace vmblab {

HermiteSpace::HermiteSpace(int max_degree) : M_(max_degree) {
    if (M_ < 2) throw ConfigInvalid("max_degree must be at least 2");
    const int L = M_ + 1;
    lookup_.assign(L * L * L, -1);
    for (int d = 0; d <= M_; ++d)
        for (int a = d; a >= 0; --a)
            for (int b = d - a; b >= 0; --b) {
                const int c = d - a - b;
                lookup_[(a * L + b) * L + c] = int(modes_.size());
                modes_.push_back({a, b, c});
            }
    for (int i = 0; i < 3; ++i) {
        std::array<int, 3> e{0, 0, 0};
        e[i] = 1;
        ie_[i] = index(e);
        e[i] = 2;
        i2e_[i] = index(e);
    }

    const int K = size();
    for (int i = 0; i < 3; ++i) {
        V_[i] = Mat::Zero(K, K);
        D_[i] = Mat::Zero(K, K);
        dv_[i] = Mat::Zero(K, K);
    }
    for (int k = 0; k < K; ++k) {
        const auto& n = modes_[k];
        for (int i = 0; i < 3; ++i) {
            std::array<int, 3> up = n, dn = n;
            up[i] += 1;
            dn[i] -= 1;
            const int ku = index(up), kd = index(dn);
            if (ku >= 0) {
                const double s = std::sqrt(double(n[i] + 1));
                V_[i](ku, k) += s;
                D_[i](ku, k) -= s;
                dv_[i](ku, k) -= 0.5 * s;
            }
            if (kd >= 0) {
                const double s = std::sqrt(double(n[i]));
                V_[i](kd, k) += s;
                dv_[i](kd, k) += 0.5 * s;
            }
        }
    }

    // Omega_k = sum_ij eps_ijk a_j^+ a_i.
    for (int k = 0; k < 3; ++k) {
        Om_[k] = Mat::Zero(K, K);
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        for (int m = 0; m < K; ++m) {
            const auto& n = modes_[m];
            // +a_j^+ a_i
            if (n[i] > 0) {
                std::array<int, 3> t = n;
                t[i] -= 1;
                t[j] += 1;
                Om_[k](index(t), m) += std::sqrt(double(n[i]) * (n[j] + 1));
            }
            // -a_i^+ a_j
            if (n[j] > 0) {
                std::array<int, 3> t = n;
                t[j] -= 1;
                t[i] += 1;
                Om_[k](index(t), m) -= std::sqrt(double(n[j]) * (n[i] + 1));
            }
        }
    }
}

int HermiteSpace::index(int n0, int n1, int n2) const {
    if (n0 < 0 || n1 < 0 || n2 < 0 || n0 + n1 + n2 > M_) return -1;
    const int L = M_ + 1;
    return lookup_[(n0 * L + n1) * L + n2];
}

Vec HermiteSpace::poly_values(const std::array<double, 3>& v) const {
    // Normalized recurrence: h_{n+1} = (v h_n - sqrt(n) h_{n-1}) / sqrt(n+1).
    std::array<std::vector<double>, 3> h;
    for (int a = 0; a < 3; ++a) {
        h[a].assign(M_ + 1, 0.0);
        h[a][0] = 1.0;
        if (M_ >= 1) h[a][1] = v[a];
        for (int n = 1; n < M_; ++n)
            h[a][n + 1] = (v[a] * h[a][n] - std::sqrt(double(n)) * h[a][n - 1]) / std::sqrt(double(n + 1));
    }
    Vec out(size());
    for (int k = 0; k < size(); ++k) {
        const auto& n = modes_[k];
        out[k] = h[0][n[0]] * h[1][n[1]] * h[2][n[2]];
    }
    return out;
}

double HermiteSpace::mu(const std::array<double, 3>& v) {
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return std::exp(-0.5 * r2) / std::pow(2.0 * pi, 1.5);
}

void gauss_hermite(int npts, std::vector<double>& nodes, std::vector<double>& weights) {
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Mat J = Mat::Zero(npts, npts);
    for (int k = 1; k < npts; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    nodes.resize(npts);
    weights.resize(npts);
    for (int k = 0; k < npts; ++k) {
        nodes[k] = es.eigenvalues()[k];
        const double q = es.eigenvectors()(0, k);
        weights[k] = q * q;
    }
}

Quadrature3::Quadrature3(int npts) {
    std::vector<double> x, w;
    gauss_hermite(npts, x, w);
    for (int a = 0; a < npts; ++a)
        for (int b = 0; b < npts; ++b)
            for (int c = 0; c < npts; ++c) {
                nodes.push_back({x[a], x[b], x[c]});
                weights.push_back(w[a] * w[b] * w[c]);
            }
}

}  // namespace vmblab
