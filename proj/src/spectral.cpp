#include "vmblab/spectral.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include "json.hpp"
#include <sstream>

#include "vmblab/error.hpp"

namespace vmblab {

namespace {
// the FFTW planner is not reentrant
std::mutex planner_mutex;
}  // namespace

Grid::Grid(int n, int dealias_num, int dealias_den)
    : n_(n), dnum_(dealias_num), dden_(dealias_den) {
    if (n < 2 || n % 2 != 0) throw ConfigInvalid("grid_n must be a positive even integer");
    if (dealias_num <= 0 || dealias_den <= 0 || dealias_num > dealias_den)
        throw ConfigInvalid("dealias_fraction must lie in (0, 1]");
    size_ = std::size_t(n) * n * n;
    kcut_ = (dnum_ * n_) / (2 * dden_);
    kd_.resize(3 * size_);
    ksq_.resize(size_);
    keep_.resize(size_);
    sign_.resize(size_);
    conj_.resize(size_);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const std::size_t idx = index(i0, i1, i2);
                const int k[3] = {wavenumber(i0), wavenumber(i1), wavenumber(i2)};
                bool keep = true;
                double s = 0;
                for (int a = 0; a < 3; ++a) {
                    kd_[3 * idx + a] = (2 * k[a] == n) ? 0.0 : double(k[a]);
                    s += double(k[a]) * k[a];
                    if (2 * dden_ * std::abs(k[a]) > dnum_ * n_) keep = false;
                }
                ksq_[idx] = s;
                keep_[idx] = keep;
                if (keep) resolved_list_.push_back(idx);
                sign_[idx] = ((i0 + i1 + i2) % 2 == 0) ? 1 : -1;
                conj_[idx] = index((n - i0) % n, (n - i1) % n, (n - i2) % n);
            }

    std::lock_guard<std::mutex> lock(planner_mutex);
    auto* a = fftw_alloc_complex(size_);
    auto* b = fftw_alloc_complex(size_);
    plan_fwd_ = fftw_plan_dft_3d(n, n, n, a, b, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_3d(n, n, n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::array<int, 3> Grid::wavevector(std::size_t idx) const {
    const int i2 = int(idx % n_);
    const int i1 = int((idx / n_) % n_);
    const int i0 = int(idx / (std::size_t(n_) * n_));
    return {wavenumber(i0), wavenumber(i1), wavenumber(i2)};
}

std::size_t Grid::index_of(int k0, int k1, int k2) const {
    auto m = [this](int k) { return ((k % n_) + n_) % n_; };
    return index(m(k0), m(k1), m(k2));
}

double Grid::kd_sq(std::size_t idx) const {
    const double* k = &kd_[3 * idx];
    return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
}

void Grid::forward(const cplx* phys, cplx* spec) const {
    std::vector<cplx> tmp(phys, phys + size_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(spec));
    const double scale = 1.0 / double(size_);
    for (std::size_t i = 0; i < size_; ++i) spec[i] *= scale * sign_[i];
}

void Grid::inverse(const cplx* spec, cplx* phys) const {
    std::vector<cplx> tmp(size_);
    for (std::size_t i = 0; i < size_; ++i) tmp[i] = spec[i] * double(sign_[i]);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(phys));
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(GridPtr grid, int rank) : grid_(std::move(grid)), rank_(rank) {
    coeffs_.assign(std::size_t(rank_) * grid_->size(), cplx(0.0));
}

SpectralField SpectralField::from_physical(GridPtr g, int rank, const std::vector<double>& values) {
    SpectralField f(g, rank);
    const std::size_t N = g->size();
    std::vector<cplx> buf(N);
    for (int c = 0; c < rank; ++c) {
        for (std::size_t i = 0; i < N; ++i) buf[i] = values[c * N + i];
        g->forward(buf.data(), f.data(c));
    }
    f.enforce_hermitian();
    return f;
}

SpectralField SpectralField::sample(GridPtr g, const std::function<double(double, double, double)>& fn) {
    const int n = g->n();
    std::vector<double> v(g->size());
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                v[g->index(i0, i1, i2)] = fn(g->coordinate(i0), g->coordinate(i1), g->coordinate(i2));
    return from_physical(g, 1, v);
}

SpectralField SpectralField::sample_vector(
    GridPtr g, const std::function<std::array<double, 3>(double, double, double)>& fn) {
    const int n = g->n();
    const std::size_t N = g->size();
    std::vector<double> v(3 * N);
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const std::size_t idx = g->index(i0, i1, i2);
                auto r = fn(g->coordinate(i0), g->coordinate(i1), g->coordinate(i2));
                for (int c = 0; c < 3; ++c) v[c * N + idx] = r[c];
            }
    return from_physical(g, 3, v);
}

std::vector<double> SpectralField::to_physical() const {
    const std::size_t N = grid_->size();
    std::vector<double> out(rank_ * N);
    std::vector<cplx> buf(N);
    for (int c = 0; c < rank_; ++c) {
        grid_->inverse(data(c), buf.data());
        for (std::size_t i = 0; i < N; ++i) out[c * N + i] = buf[i].real();
    }
    return out;
}

SpectralField SpectralField::component(int c) const {
    SpectralField s(grid_, 1);
    std::copy(data(c), data(c) + grid_->size(), s.data());
    return s;
}

void SpectralField::set_component(int c, const SpectralField& s) {
    std::copy(s.data(), s.data() + grid_->size(), data(c));
}

double SpectralField::norm_l2() const {
    double s = 0;
    for (const auto& z : coeffs_) s += std::norm(z);
    return std::sqrt(box_volume * s);
}

double derivative_weight(const std::array<int, 3>& k, int s) {
    double w = 0;
    for (int a = 0; a <= s; ++a)
        for (int b = 0; a + b <= s; ++b)
            for (int c = 0; a + b + c <= s; ++c)
                w += std::pow(double(k[0]) * k[0], a) * std::pow(double(k[1]) * k[1], b) *
                     std::pow(double(k[2]) * k[2], c);
    return w;
}

double SpectralField::norm_h(int s) const {
    const std::size_t N = grid_->size();
    double sum = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double m = 0;
        for (int c = 0; c < rank_; ++c) m += std::norm(at(c, i));
        if (m != 0) sum += m * derivative_weight(grid_->wavevector(i), s);
    }
    return std::sqrt(box_volume * sum);
}

double SpectralField::max_abs() const {
    double m = 0;
    for (double v : to_physical()) m = std::max(m, std::abs(v));
    return m;
}

double SpectralField::hermitian_defect() const {
    const std::size_t N = grid_->size();
    double d = 0;
    for (int c = 0; c < rank_; ++c)
        for (std::size_t i = 0; i < N; ++i)
            d = std::max(d, std::abs(at(c, i) - std::conj(at(c, grid_->conjugate_index(i)))));
    return d;
}

void SpectralField::enforce_hermitian() {
    const std::size_t N = grid_->size();
    for (int c = 0; c < rank_; ++c)
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t j = grid_->conjugate_index(i);
            if (j < i) continue;
            const cplx avg = 0.5 * (at(c, i) + std::conj(at(c, j)));
            at(c, i) = avg;
            at(c, j) = std::conj(avg);
        }
}

bool SpectralField::all_finite() const {
    for (const auto& z : coeffs_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (a.empty() || b.empty() || !a.grid().same_as(b.grid()))
        throw GridMismatch("fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : coeffs_) z *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
    require_same_grid(*this, x);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

// ---------------------------------------------------------------------------

SpectralField derivative(const SpectralField& f, int axis) {
    SpectralField out(f.grid_ptr(), f.rank());
    const auto& g = f.grid();
    for (int c = 0; c < f.rank(); ++c)
        for (std::size_t i = 0; i < g.size(); ++i)
            out.at(c, i) = cplx(0.0, g.kd(i, axis)) * f.at(c, i);
    return out;
}

SpectralField gradient(const SpectralField& s) {
    SpectralField out(s.grid_ptr(), 3);
    const auto& g = s.grid();
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < g.size(); ++i) out.at(a, i) = cplx(0.0, g.kd(i, a)) * s.at(0, i);
    return out;
}

SpectralField divergence(const SpectralField& v) {
    SpectralField out(v.grid_ptr(), 1);
    const auto& g = v.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        cplx s = 0;
        for (int a = 0; a < 3; ++a) s += cplx(0.0, g.kd(i, a)) * v.at(a, i);
        out.at(0, i) = s;
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out(f.grid_ptr(), f.rank());
    const auto& g = f.grid();
    for (int c = 0; c < f.rank(); ++c)
        for (std::size_t i = 0; i < g.size(); ++i) out.at(c, i) = -g.ksq(i) * f.at(c, i);
    return out;
}

SpectralField inverse_laplacian_zero_mean(const SpectralField& f) {
    const auto& g = f.grid();
    double nrm = 0;
    for (const auto& z : f.coeffs()) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (int c = 0; c < f.rank(); ++c)
        if (std::abs(f.at(c, 0)) > 1e-12 * nrm)
            throw NonZeroMean("inverse Laplacian of a field with nonzero mean");
    SpectralField out(f.grid_ptr(), f.rank());
    for (int c = 0; c < f.rank(); ++c)
        for (std::size_t i = 1; i < g.size(); ++i) out.at(c, i) = -f.at(c, i) / g.ksq(i);
    return out;
}

SpectralField leray_project(const SpectralField& v) {
    SpectralField out = v;
    const auto& g = v.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k2 = g.kd_sq(i);
        if (k2 == 0) continue;
        cplx kv = 0;
        for (int a = 0; a < 3; ++a) kv += g.kd(i, a) * v.at(a, i);
        for (int a = 0; a < 3; ++a) out.at(a, i) -= g.kd(i, a) * kv / k2;
    }
    return out;
}

SpectralField curl(const SpectralField& v) {
    SpectralField out(v.grid_ptr(), 3);
    const auto& g = v.grid();
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k0 = g.kd(i, 0), k1 = g.kd(i, 1), k2 = g.kd(i, 2);
        out.at(0, i) = I * (k1 * v.at(2, i) - k2 * v.at(1, i));
        out.at(1, i) = I * (k2 * v.at(0, i) - k0 * v.at(2, i));
        out.at(2, i) = I * (k0 * v.at(1, i) - k1 * v.at(0, i));
    }
    return out;
}

SpectralField helmholtz_solve(const SpectralField& c, const SpectralField& d,
                              const std::array<double, 3>& mean, double ref_scale) {
    require_same_grid(c, d);
    const auto& g = c.grid();
    double scale = std::max(c.norm_l2() + d.norm_l2(), ref_scale);
    const double defect = divergence(c).norm_l2();
    double cmean = 0;
    for (int a = 0; a < 3; ++a) cmean = std::max(cmean, std::abs(c.at(a, 0)) * std::sqrt(box_volume));
    if (defect > 1e-8 * std::max(scale, 1e-300) + 1e-300 || cmean > 1e-8 * std::max(scale, 1e-300))
        throw IncompatibleSources("curl data must be divergence-free with zero mean");
    if (std::abs(d.at(0, 0)) * std::sqrt(box_volume) > 1e-8 * std::max(scale, 1e-300))
        throw IncompatibleSources("divergence data must have zero mean");
    SpectralField out(c.grid_ptr(), 3);
    const cplx I(0.0, 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double k2 = g.kd_sq(i);
        if (k2 == 0) continue;
        const double k[3] = {g.kd(i, 0), g.kd(i, 1), g.kd(i, 2)};
        const cplx cc[3] = {c.at(0, i), c.at(1, i), c.at(2, i)};
        const cplx kxc[3] = {k[1] * cc[2] - k[2] * cc[1], k[2] * cc[0] - k[0] * cc[2],
                             k[0] * cc[1] - k[1] * cc[0]};
        for (int a = 0; a < 3; ++a) out.at(a, i) = (-I * k[a] * d.at(0, i) + I * kxc[a]) / k2;
    }
    for (int a = 0; a < 3; ++a) out.at(a, 0) = mean[a];
    return out;
}

void dealias_filter(SpectralField& f) {
    const auto& g = f.grid();
    for (int c = 0; c < f.rank(); ++c)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!g.resolved(i)) f.at(c, i) = 0;
}

namespace {

std::vector<cplx> filtered_physical(const SpectralField& f, int c) {
    const auto& g = f.grid();
    std::vector<cplx> spec(f.data(c), f.data(c) + g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.resolved(i)) spec[i] = 0;
    std::vector<cplx> phys(g.size());
    g.inverse(spec.data(), phys.data());
    for (auto& z : phys) z = z.real();
    return phys;
}

void finish_product(SpectralField& out, int c, std::vector<cplx>& phys) {
    out.grid().forward(phys.data(), out.data(c));
}

}  // namespace

SpectralField dealias_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    if (a.rank() == 3 && b.rank() == 3)
        throw GridMismatch("dealias_product of two vectors; use dealias_dot or dealias_cross");
    const SpectralField& s = a.rank() == 1 ? a : b;
    const SpectralField& o = a.rank() == 1 ? b : a;
    SpectralField out(a.grid_ptr(), o.rank());
    auto ps = filtered_physical(s, 0);
    for (int c = 0; c < o.rank(); ++c) {
        auto po = filtered_physical(o, c);
        for (std::size_t i = 0; i < po.size(); ++i) po[i] *= ps[i];
        finish_product(out, c, po);
    }
    dealias_filter(out);
    out.enforce_hermitian();
    return out;
}

SpectralField dealias_dot(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    SpectralField out(a.grid_ptr(), 1);
    std::vector<cplx> acc(a.grid().size(), 0.0);
    for (int c = 0; c < 3; ++c) {
        auto pa = filtered_physical(a, c);
        auto pb = filtered_physical(b, c);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += pa[i] * pb[i];
    }
    finish_product(out, 0, acc);
    dealias_filter(out);
    out.enforce_hermitian();
    return out;
}

SpectralField dealias_cross(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    SpectralField out(a.grid_ptr(), 3);
    std::vector<std::vector<cplx>> pa(3), pb(3);
    for (int c = 0; c < 3; ++c) {
        pa[c] = filtered_physical(a, c);
        pb[c] = filtered_physical(b, c);
    }
    const std::size_t N = a.grid().size();
    for (int c = 0; c < 3; ++c) {
        const int p = (c + 1) % 3, q = (c + 2) % 3;
        std::vector<cplx> r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = pa[p][i] * pb[q][i] - pa[q][i] * pb[p][i];
        finish_product(out, c, r);
    }
    dealias_filter(out);
    out.enforce_hermitian();
    return out;
}

SpectralField advect(const SpectralField& u, const SpectralField& f) {
    require_same_grid(u, f);
    SpectralField out(f.grid_ptr(), f.rank());
    const std::size_t N = f.grid().size();
    std::vector<std::vector<cplx>> pu(3);
    for (int a = 0; a < 3; ++a) pu[a] = filtered_physical(u, a);
    for (int c = 0; c < f.rank(); ++c) {
        std::vector<cplx> acc(N, 0.0);
        const SpectralField fc = f.component(c);
        for (int a = 0; a < 3; ++a) {
            auto d = filtered_physical(derivative(fc, a), 0);
            for (std::size_t i = 0; i < N; ++i) acc[i] += pu[a][i] * d[i];
        }
        finish_product(out, c, acc);
    }
    dealias_filter(out);
    out.enforce_hermitian();
    return out;
}

double inner(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    double s = 0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) s += (a.coeffs()[i] * std::conj(b.coeffs()[i])).real();
    return box_volume * s;
}

// ---------------------------------------------------------------------------
// .specf: one line of JSON, a newline, then 2 * rank * n^3 little-endian doubles
// (re, im interleaved), component-major, flat index order within a component.

namespace {

void put_le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_le(std::istream& is) {
    std::uint64_t bits;
    is.read(reinterpret_cast<char*>(&bits), 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_specf(const std::string& path, const SpectralField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    nlohmann::json h;
    h["format"] = "specf";
    h["grid"] = f.grid().n();
    h["rank"] = f.rank();
    h["dealias_fraction"] = f.grid().dealias_fraction();
    h["dealias_ratio"] = {f.grid().dealias_num(), f.grid().dealias_den()};
    os << h.dump() << '\n';
    for (const auto& z : f.coeffs()) {
        put_le(os, z.real());
        put_le(os, z.imag());
    }
}

SpectralField read_specf(const std::string& path, GridPtr grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw IoError(path + ": bad header");
    }
    const int n = h.at("grid").get<int>();
    const int rank = h.at("rank").get<int>();
    int num = 2, den = 3;
    if (h.contains("dealias_ratio")) {
        num = h["dealias_ratio"][0].get<int>();
        den = h["dealias_ratio"][1].get<int>();
    }
    if (!grid) grid = make_grid(n, num, den);
    if (grid->n() != n) throw GridMismatch(path + ": grid size differs");
    SpectralField f(grid, rank);
    for (auto& z : f.coeffs()) {
        const double re = get_le(is);
        const double im = get_le(is);
        z = cplx(re, im);
    }
    if (!is) throw IoError(path + ": truncated coefficient block");
    return f;
}

}  // namespace vmblab
