#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace vmblab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tensor Hermite functions psi_n(v) = He_n(v) sqrt(mu(v)) / sqrt(n!), |n| <= M,
// orthonormal in L2(R^3). Modes are ordered by total degree, then lexicographically.
class HermiteSpace {
public:
    explicit HermiteSpace(int max_degree = 4);

    int max_degree() const { return M_; }
    int size() const { return int(modes_.size()); }
    const std::array<int, 3>& multi_index(int k) const { return modes_[k]; }
    int degree(int k) const { return modes_[k][0] + modes_[k][1] + modes_[k][2]; }
    // -1 when any entry is negative or the degree exceeds M.
    int index(int n0, int n1, int n2) const;
    int index(const std::array<int, 3>& n) const { return index(n[0], n[1], n[2]); }

    static constexpr int i0 = 0;
    int ie(int i) const { return ie_[i]; }
    int i2e(int i) const { return i2e_[i]; }

    // Multiplication by v_i, truncated at degree M.
    const Mat& V(int i) const { return V_[i]; }
    // f -> mu^{-1/2} d/dv_i (mu^{1/2} f); acts as -sqrt(n_i + 1) psi_{n+e_i}.
    const Mat& D(int i) const { return D_[i]; }
    // d/dv_i on the psi basis, (a_i - a_i^+)/2.
    const Mat& dv(int i) const { return dv_[i]; }
    // Generator of (v x B).grad_v for B = e_k; degree preserving and skew.
    const Mat& Omega(int k) const { return Om_[k]; }

    // He_n(v)/sqrt(n!) for every mode, so psi_n(v) = h_n(v) sqrt(mu(v)).
    Vec poly_values(const std::array<double, 3>& v) const;
    static double mu(const std::array<double, 3>& v);

    Vec zero() const { return Vec::Zero(size()); }
    Vec unit(int k) const { return Vec::Unit(size(), k); }

private:
    int M_;
    std::vector<std::array<int, 3>> modes_;
    std::vector<int> lookup_;
    std::array<int, 3> ie_{}, i2e_{};
    std::array<Mat, 3> V_, D_, dv_, Om_;
};

// Gauss-Hermite rule for the standard normal weight (weights sum to 1).
void gauss_hermite(int npts, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor Gauss-Hermite rule on R^3 for the weight mu.
struct Quadrature3 {
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;
    explicit Quadrature3(int npts_per_axis);
};

}  // namespace vmblab
