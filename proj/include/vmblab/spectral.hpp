#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vmblab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double box_volume = 8.0 * pi * pi * pi;

// Periodic box [-pi, pi]^3 with n points per axis. Coefficients are normalized
// so that f(x) = sum_k c_k exp(i k.x); the k = 0 coefficient is the box average.
// Flat index is row-major (i0, i1, i2) with i0 along x1.
class Grid {
public:
    explicit Grid(int n, int dealias_num = 2, int dealias_den = 3);
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    int n() const { return n_; }
    std::size_t size() const { return size_; }
    int dealias_num() const { return dnum_; }
    int dealias_den() const { return dden_; }
    double dealias_fraction() const { return double(dnum_) / double(dden_); }
    // Largest |k_i| kept by the dealias filter.
    int kmax_resolved() const { return kcut_; }

    int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }
    std::array<int, 3> wavevector(std::size_t idx) const;
    std::size_t index(int i0, int i1, int i2) const {
        return (std::size_t(i0) * n_ + i1) * n_ + i2;
    }
    std::size_t index_of(int k0, int k1, int k2) const;
    std::size_t conjugate_index(std::size_t idx) const { return conj_[idx]; }

    // Wavenumber used by odd-order derivatives; zero on the Nyquist planes, where
    // the sampled derivative of cos(n x / 2) vanishes.
    double kd(std::size_t idx, int axis) const { return kd_[3 * idx + axis]; }
    double ksq(std::size_t idx) const { return ksq_[idx]; }
    double kd_sq(std::size_t idx) const;
    bool resolved(std::size_t idx) const { return keep_[idx] != 0; }
    const std::vector<std::size_t>& resolved_modes() const { return resolved_list_; }

    double coordinate(int j) const { return -pi + 2.0 * pi * j / n_; }

    void forward(const cplx* phys, cplx* spec) const;
    void inverse(const cplx* spec, cplx* phys) const;

    bool same_as(const Grid& o) const {
        return n_ == o.n_ && dnum_ * o.dden_ == o.dnum_ * dden_;
    }

private:
    int n_, dnum_, dden_, kcut_;
    std::size_t size_;
    std::vector<double> kd_, ksq_;
    std::vector<std::uint8_t> keep_;
    std::vector<signed char> sign_;
    std::vector<std::size_t> conj_, resolved_list_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int n, int dnum = 2, int dden = 3) {
    return std::make_shared<const Grid>(n, dnum, dden);
}

class SpectralField {
public:
    SpectralField() = default;
    SpectralField(GridPtr grid, int rank);

    static SpectralField scalar(GridPtr g) { return SpectralField(std::move(g), 1); }
    static SpectralField vector(GridPtr g) { return SpectralField(std::move(g), 3); }
    // values: rank blocks of n^3 physical samples.
    static SpectralField from_physical(GridPtr g, int rank, const std::vector<double>& values);
    static SpectralField sample(GridPtr g, const std::function<double(double, double, double)>& fn);
    static SpectralField sample_vector(
        GridPtr g, const std::function<std::array<double, 3>(double, double, double)>& fn);

    std::vector<double> to_physical() const;

    int rank() const { return rank_; }
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool empty() const { return !grid_; }

    cplx* data(int c = 0) { return coeffs_.data() + c * grid_->size(); }
    const cplx* data(int c = 0) const { return coeffs_.data() + c * grid_->size(); }
    cplx& at(int c, std::size_t idx) { return coeffs_[c * grid_->size() + idx]; }
    const cplx& at(int c, std::size_t idx) const { return coeffs_[c * grid_->size() + idx]; }
    std::vector<cplx>& coeffs() { return coeffs_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

    SpectralField component(int c) const;
    void set_component(int c, const SpectralField& s);

    cplx mean(int c = 0) const { return at(c, 0); }
    double integral(int c = 0) const { return box_volume * at(c, 0).real(); }

    // L2 norm over the box, all components.
    double norm_l2() const;
    // (sum over |gamma| <= s of ||d^gamma f||^2)^(1/2).
    double norm_h(int s) const;
    double max_abs() const;
    double hermitian_defect() const;
    void enforce_hermitian();
    bool all_finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    SpectralField& axpy(double a, const SpectralField& x);

private:
    GridPtr grid_;
    int rank_ = 0;
    std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_grid(const SpectralField& a, const SpectralField& b);

// Sum over |gamma| <= s of prod_i k_i^(2 gamma_i).
double derivative_weight(const std::array<int, 3>& k, int s);

SpectralField derivative(const SpectralField& f, int axis);
SpectralField gradient(const SpectralField& scalar);
SpectralField divergence(const SpectralField& vec);
SpectralField laplacian(const SpectralField& f);
SpectralField inverse_laplacian_zero_mean(const SpectralField& f);
SpectralField leray_project(const SpectralField& vec);
SpectralField curl(const SpectralField& vec);
// Solve curl X = c, div X = d with mean(X) = m. Requires div c = 0 and mean(c) = 0,
// checked relative to max(|c| + |d|, ref_scale); pass ref_scale when c is a
// difference of larger terms.
SpectralField helmholtz_solve(const SpectralField& curl_data, const SpectralField& div_data,
                              const std::array<double, 3>& mean, double ref_scale = 0);

void dealias_filter(SpectralField& f);
// Pointwise products with 2/3-rule dealiasing of inputs and output; ranks (1,1), (1,3), (3,1).
SpectralField dealias_product(const SpectralField& a, const SpectralField& b);
SpectralField dealias_dot(const SpectralField& a, const SpectralField& b);
SpectralField dealias_cross(const SpectralField& a, const SpectralField& b);
// (u . grad) f for scalar or vector f.
SpectralField advect(const SpectralField& u, const SpectralField& f);

// Box integral of a.b (real fields).
double inner(const SpectralField& a, const SpectralField& b);

void write_specf(const std::string& path, const SpectralField& f);
SpectralField read_specf(const std::string& path, GridPtr grid = nullptr);

}  // namespace vmblab
