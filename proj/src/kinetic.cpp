#include "vmblab/kinetic.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "vmblab/error.hpp"

namespace vmblab {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

KineticState KineticState::zero(const GridPtr& grid, const HermiteSpace& space, double epsilon) {
    KineticState s;
    s.f = SpectralField(grid, space.size());
    s.g = SpectralField(grid, space.size());
    s.E = SpectralField::vector(grid);
    s.B = SpectralField::vector(grid);
    s.epsilon = epsilon;
    return s;
}

Moments moments(const SpectralField& f, const SpectralField& g, const CollisionModel& model) {
    const auto& S = model.space();
    Moments m;
    m.rho = f.component(HermiteSpace::i0);
    m.u = SpectralField::vector(f.grid_ptr());
    for (int i = 0; i < 3; ++i) m.u.set_component(i, f.component(S.ie(i)));
    m.theta = SpectralField::scalar(f.grid_ptr());
    for (int i = 0; i < 3; ++i) m.theta.axpy(std::sqrt(2.0) / 3.0, f.component(S.i2e(i)));
    m.sigma = g.component(HermiteSpace::i0);
    return m;
}

Moments moments(const KineticState& s, const CollisionModel& model) { return moments(s.f, s.g, model); }

SpectralField charge(const SpectralField& g) { return g.component(HermiteSpace::i0); }

SpectralField current(const SpectralField& g, const HermiteSpace& space) {
    SpectralField j = SpectralField::vector(g.grid_ptr());
    for (int i = 0; i < 3; ++i) j.set_component(i, g.component(space.ie(i)));
    return j;
}

double gauss_E_residual(const KineticState& s) { return (divergence(s.E) - charge(s.g)).norm_l2(); }

double gauss_B_residual(const KineticState& s) { return divergence(s.B).norm_l2(); }

namespace {

std::array<double, 3> field_cross_integral(const SpectralField& E, const SpectralField& B) {
    std::array<double, 3> out{0, 0, 0};
    const std::size_t N = E.grid().size();
    for (std::size_t i = 0; i < N; ++i)
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            out[a] += (E.at(b, i) * std::conj(B.at(c, i)) - E.at(c, i) * std::conj(B.at(b, i))).real();
        }
    for (auto& x : out) x *= box_volume;
    return out;
}

}  // namespace

Conserved conserved(const KineticState& s, const HermiteSpace& S) {
    Conserved c;
    c.mass = box_volume * s.f.at(HermiteSpace::i0, 0).real();
    c.charge = box_volume * s.g.at(HermiteSpace::i0, 0).real();
    const auto exb = field_cross_integral(s.E, s.B);
    for (int i = 0; i < 3; ++i) c.momentum[i] = box_volume * s.f.at(S.ie(i), 0).real() + exb[i];
    double kin = 3.0 * s.f.at(HermiteSpace::i0, 0).real();
    for (int i = 0; i < 3; ++i) kin += std::sqrt(2.0) * s.f.at(S.i2e(i), 0).real();
    const double eb = s.E.norm_l2(), bb = s.B.norm_l2();
    c.energy = box_volume * kin + eb * eb + bb * bb;
    return c;
}

double enforce_conservation_constraints(KineticState& s, const HermiteSpace& S) {
    const KineticState before = s;
    s.f.at(HermiteSpace::i0, 0) = 0;
    s.g.at(HermiteSpace::i0, 0) = 0;
    const auto exb = field_cross_integral(s.E, s.B);
    for (int i = 0; i < 3; ++i) s.f.at(S.ie(i), 0) = -exb[i] / box_volume;
    const double e = conserved(s, S).energy;
    const double delta = -e / (box_volume * 3.0 * std::sqrt(2.0));
    for (int i = 0; i < 3; ++i) s.f.at(S.i2e(i), 0) += delta;
    return (s.f - before.f).norm_l2() + (s.g - before.g).norm_l2();
}

KineticState lift_expansion(const std::vector<OrderFields>& orders, double eps, const GridPtr& grid,
                            const HermiteSpace& space) {
    KineticState s = KineticState::zero(grid, space, eps);
    double w = 1.0;
    for (const auto& o : orders) {
        w *= eps;
        auto add = [&](SpectralField& dst, const SpectralField& src) {
            if (src.empty()) return;
            if (src.rank() != dst.rank() || !src.grid().same_as(dst.grid()))
                throw OrderMismatch("expansion order does not match the kinetic layout");
            dst.axpy(w, src);
        };
        add(s.f, o.f);
        add(s.g, o.g);
        add(s.E, o.E);
        add(s.B, o.B);
    }
    return s;
}

OrderFields remainder(const KineticState& s, const std::vector<OrderFields>& orders, int n) {
    if (n < 1) throw OrderMismatch("remainder order must be at least 1");
    if (int(orders.size()) < n - 1) throw OrderMismatch("expansion is missing orders below the remainder order");
    const double en = std::pow(s.epsilon, n);
    if (en < 1e-12) throw EpsilonUnderflow("epsilon^n is below 1e-12");
    OrderFields r{s.f, s.g, s.E, s.B};
    double w = 1.0;
    for (int m = 0; m < n - 1; ++m) {
        w *= s.epsilon;
        const auto& o = orders[m];
        if (!o.f.empty()) r.f.axpy(-w, o.f);
        if (!o.g.empty()) r.g.axpy(-w, o.g);
        if (!o.E.empty()) r.E.axpy(-w, o.E);
        if (!o.B.empty()) r.B.axpy(-w, o.B);
    }
    r.f *= 1.0 / en;
    r.g *= 1.0 / en;
    r.E *= 1.0 / en;
    r.B *= 1.0 / en;
    return r;
}

// ---------------------------------------------------------------------------

void matrix_phi(const MatrixXcd& Z, MatrixXcd& e, MatrixXcd& p1, MatrixXcd& p2) {
    const int n = int(Z.rows());
    const double nrm = Z.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (nrm > 0.5) s = int(std::ceil(std::log2(nrm / 0.5)));
    const MatrixXcd Y = Z / std::ldexp(1.0, s);
    const MatrixXcd I = MatrixXcd::Identity(n, n);
    // Horner form of e = sum Y^j/j!, p1 = sum Y^j/(j+1)!, p2 = sum Y^j/(j+2)!.
    const int order = 16;
    auto series = [&](int shift) {
        MatrixXcd acc = I;
        for (int j = order; j >= 1; --j) acc = I + Y * acc / double(j + shift);
        if (shift == 0) return acc;
        double f = 1;
        for (int j = 2; j <= shift; ++j) f *= j;
        return MatrixXcd(acc / f);
    };
    e = series(0);
    p1 = series(1);
    p2 = series(2);
    for (int k = 0; k < s; ++k) {
        p2 = 0.25 * (e * p2 + p1 + p2);
        p1 = 0.5 * (e + I) * p1;
        e = e * e;
    }
}

namespace {

MatrixXcd p1_matrix(const HermiteSpace& S) {
    const int K = S.size();
    MatrixXcd P = MatrixXcd::Zero(K, K);
    P(0, 0) = 1;
    for (int i = 0; i < 3; ++i) P(S.ie(i), S.ie(i)) = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) P(S.i2e(i), S.i2e(j)) = 1.0 / 3.0;
    return P;
}

}  // namespace

KineticStepper::KineticStepper(GridPtr grid, std::shared_ptr<const CollisionModel> model, double epsilon,
                               double dt, StepperOptions opt)
    : grid_(std::move(grid)), model_(std::move(model)), eps_(epsilon), dt_(dt), opt_(opt) {
    if (!(eps_ > 0) || eps_ > 1) throw ConfigInvalid("epsilon must lie in (0, 1]");
    if (!(dt_ > 0)) throw ConfigInvalid("dt must be positive");
    for (std::size_t idx : grid_->resolved_modes())
        if (grid_->conjugate_index(idx) >= idx) modes_.push_back(idx);
    fblk_.resize(modes_.size());
    gblk_.resize(modes_.size());
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const auto k = grid_->wavevector(modes_[m]);
        matrix_phi(dt_ * f_generator(k), fblk_[m].e, fblk_[m].p1, fblk_[m].p2);
        matrix_phi(dt_ * g_generator(k), gblk_[m].e, gblk_[m].p1, gblk_[m].p2);
    }
}

MatrixXcd kinetic_f_generator(const std::array<int, 3>& k, const CollisionModel& model, double eps) {
    const auto& S = model.space();
    const int K = S.size();
    const cplx I(0, 1);
    MatrixXcd A = -(model.nu0() / (eps * eps)) * (MatrixXcd::Identity(K, K) - p1_matrix(S));
    for (int a = 0; a < 3; ++a) A -= (I * double(k[a]) / eps) * S.V(a).cast<cplx>();
    return A;
}

MatrixXcd kinetic_g_generator(const std::array<int, 3>& k, const CollisionModel& model, double eps, bool vacuum) {
    const auto& S = model.space();
    const int K = S.size();
    const cplx I(0, 1);
    MatrixXcd A = MatrixXcd::Zero(K + 6, K + 6);
    MatrixXcd P2 = MatrixXcd::Zero(K, K);
    P2(0, 0) = 1;
    A.topLeftCorner(K, K) = -(model.nu0() / (eps * eps)) * (MatrixXcd::Identity(K, K) - P2);
    for (int a = 0; a < 3; ++a) A.topLeftCorner(K, K) -= (I * double(k[a]) / eps) * S.V(a).cast<cplx>();
    // (k x)_{ac} = sum_b epsabc k_b
    Eigen::Matrix3cd C;
    C << 0, -double(k[2]), double(k[1]), double(k[2]), 0, -double(k[0]), -double(k[1]), double(k[0]), 0;
    const int iE = K, iB = K + 3;
    A.block(iE, iB, 3, 3) = (I / eps) * C;
    A.block(iB, iE, 3, 3) = -(I / eps) * C;
    if (!vacuum)
        for (int a = 0; a < 3; ++a) {
            A(S.ie(a), iE + a) += 1.0 / eps;
            A(iE + a, S.ie(a)) -= 1.0 / eps;
        }
    return A;
}

MatrixXcd KineticStepper::f_generator(const std::array<int, 3>& k) const {
    return kinetic_f_generator(k, *model_, eps_);
}

MatrixXcd KineticStepper::g_generator(const std::array<int, 3>& k) const {
    return kinetic_g_generator(k, *model_, eps_, opt_.vacuum);
}

double KineticStepper::lorentz_rate(const KineticState& s) const {
    const int M = model_->space().max_degree();
    const double vM = std::sqrt(4.0 * M + 2.0);
    return (s.E.max_abs() + vM * s.B.max_abs()) * std::sqrt(M + 1.0);
}

void KineticStepper::explicit_terms(const KineticState& s, SpectralField& Nf, SpectralField& Ng) const {
    const auto& S = model_->space();
    const auto& C = *model_;
    const int K = S.size();
    const std::size_t N = grid_->size();
    const std::vector<double> pf = s.f.to_physical(), pg = s.g.to_physical();
    const std::vector<double> pE = s.E.to_physical(), pB = s.B.to_physical();
    std::vector<double> of(K * N), og(K * N);
    const double ie = 1.0 / eps_, ie2 = 1.0 / (eps_ * eps_);
    Vec fv(K), gv(K);
    Mat Lor(K, K);
    for (std::size_t x = 0; x < N; ++x) {
        for (int n = 0; n < K; ++n) {
            fv[n] = pf[n * N + x];
            gv[n] = pg[n * N + x];
        }
        Lor.setZero();
        for (int a = 0; a < 3; ++a) {
            Lor += pE[a * N + x] * S.D(a);
            Lor += pB[a * N + x] * S.Omega(a);
        }
        const Vec rf = -ie * (Lor * gv) + ie2 * C.gamma(fv, fv);
        const Vec rg = -ie * (Lor * fv) + ie2 * C.gamma(gv, fv);
        for (int n = 0; n < K; ++n) {
            of[n * N + x] = rf[n];
            og[n * N + x] = rg[n];
        }
    }
    Nf = SpectralField::from_physical(grid_, K, of);
    Ng = SpectralField::from_physical(grid_, K, og);
    dealias_filter(Nf);
    dealias_filter(Ng);
}

KineticState KineticStepper::rhs(const KineticState& s) const {
    SpectralField Nf, Ng;
    explicit_terms(s, Nf, Ng);
    const int K = model_->space().size();
    KineticState r = KineticState::zero(grid_, model_->space(), eps_);
    r.t = s.t;
    for (std::size_t idx : grid_->resolved_modes()) {
        const auto k = grid_->wavevector(idx);
        const MatrixXcd Af = f_generator(k), Ag = g_generator(k);
        VectorXcd yf(K), yg(K + 6);
        for (int n = 0; n < K; ++n) {
            yf[n] = s.f.at(n, idx);
            yg[n] = s.g.at(n, idx);
        }
        for (int a = 0; a < 3; ++a) {
            yg[K + a] = s.E.at(a, idx);
            yg[K + 3 + a] = s.B.at(a, idx);
        }
        const VectorXcd df = Af * yf, dg = Ag * yg;
        for (int n = 0; n < K; ++n) {
            r.f.at(n, idx) = df[n] + Nf.at(n, idx);
            r.g.at(n, idx) = dg[n] + Ng.at(n, idx);
        }
        for (int a = 0; a < 3; ++a) {
            r.E.at(a, idx) = dg[K + a];
            r.B.at(a, idx) = dg[K + 3 + a];
        }
    }
    return r;
}

void KineticStepper::step(KineticState& s) const {
    if (std::abs(s.epsilon - eps_) > 1e-15 * eps_) throw ConfigInvalid("state epsilon differs from stepper epsilon");
    const double r = lorentz_rate(s);
    if (dt_ * r > 1.0) throw CflViolation("Lorentz-term CFL number exceeds 1");
    if (dt_ * r / eps_ > 1.0) throw EpsilonTooSmall("dt * lorentz_rate / epsilon exceeds 1; reduce dt");

    const int K = model_->space().size();
    const double h = dt_;

    auto gather = [&](const KineticState& st, std::size_t idx, VectorXcd& yf, VectorXcd& yg) {
        yf.resize(K);
        yg.resize(K + 6);
        for (int n = 0; n < K; ++n) {
            yf[n] = st.f.at(n, idx);
            yg[n] = st.g.at(n, idx);
        }
        for (int a = 0; a < 3; ++a) {
            yg[K + a] = st.E.at(a, idx);
            yg[K + 3 + a] = st.B.at(a, idx);
        }
    };
    auto scatter = [&](KineticState& st, std::size_t idx, const VectorXcd& yf, const VectorXcd& yg) {
        const std::size_t jdx = grid_->conjugate_index(idx);
        for (int n = 0; n < K; ++n) {
            st.f.at(n, idx) = yf[n];
            st.g.at(n, idx) = yg[n];
        }
        for (int a = 0; a < 3; ++a) {
            st.E.at(a, idx) = yg[K + a];
            st.B.at(a, idx) = yg[K + 3 + a];
        }
        if (jdx == idx) {
            for (int n = 0; n < K; ++n) {
                st.f.at(n, idx) = st.f.at(n, idx).real();
                st.g.at(n, idx) = st.g.at(n, idx).real();
            }
            for (int a = 0; a < 3; ++a) {
                st.E.at(a, idx) = st.E.at(a, idx).real();
                st.B.at(a, idx) = st.B.at(a, idx).real();
            }
            return;
        }
        for (int n = 0; n < K; ++n) {
            st.f.at(n, jdx) = std::conj(yf[n]);
            st.g.at(n, jdx) = std::conj(yg[n]);
        }
        for (int a = 0; a < 3; ++a) {
            st.E.at(a, jdx) = std::conj(yg[K + a]);
            st.B.at(a, jdx) = std::conj(yg[K + 3 + a]);
        }
    };

    SpectralField Nf0, Ng0;
    explicit_terms(s, Nf0, Ng0);
    KineticState a = KineticState::zero(grid_, model_->space(), eps_);
    VectorXcd yf, yg, nf(K), ng(K + 6);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const std::size_t idx = modes_[m];
        gather(s, idx, yf, yg);
        for (int n = 0; n < K; ++n) {
            nf[n] = Nf0.at(n, idx);
            ng[n] = Ng0.at(n, idx);
        }
        ng.tail(6).setZero();
        scatter(a, idx, fblk_[m].e * yf + h * (fblk_[m].p1 * nf), gblk_[m].e * yg + h * (gblk_[m].p1 * ng));
    }
    a.t = s.t + h;
    SpectralField Nf1, Ng1;
    explicit_terms(a, Nf1, Ng1);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const std::size_t idx = modes_[m];
        gather(a, idx, yf, yg);
        for (int n = 0; n < K; ++n) {
            nf[n] = Nf1.at(n, idx) - Nf0.at(n, idx);
            ng[n] = Ng1.at(n, idx) - Ng0.at(n, idx);
        }
        ng.tail(6).setZero();
        scatter(a, idx, yf + h * (fblk_[m].p2 * nf), yg + h * (gblk_[m].p2 * ng));
    }
    if (!a.f.all_finite() || !a.g.all_finite() || !a.E.all_finite() || !a.B.all_finite())
        throw NonFiniteState("kinetic state has non-finite coefficients");
    s = std::move(a);
}

void step_vmb(KineticState& s, double dt, std::shared_ptr<const CollisionModel> model) {
    thread_local std::unique_ptr<KineticStepper> cache;
    thread_local const Grid* cache_grid = nullptr;
    if (!cache || cache_grid != &s.grid() || &cache->model() != model.get() || cache->epsilon() != s.epsilon ||
        cache->dt() != dt) {
        cache = std::make_unique<KineticStepper>(s.f.grid_ptr(), model, s.epsilon, dt);
        cache_grid = &s.grid();
    }
    cache->step(s);
}

// ---------------------------------------------------------------------------
// .kin: one JSON header line, then f, g, E, B as little-endian (re, im) float64
// pairs, component-major.

namespace {

void put_le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_le(std::istream& is) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_kin(const std::string& path, const KineticState& s, int max_degree) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    nlohmann::json h;
    h["format"] = "kin";
    h["grid"] = s.grid().n();
    h["M"] = max_degree;
    h["modes"] = s.modes();
    h["epsilon"] = s.epsilon;
    h["t"] = s.t;
    h["dealias_ratio"] = {s.grid().dealias_num(), s.grid().dealias_den()};
    h["blocks"] = {"f", "g", "E", "B"};
    os << h.dump() << '\n';
    for (const SpectralField* F : {&s.f, &s.g, &s.E, &s.B})
        for (const auto& z : F->coeffs()) {
            put_le(os, z.real());
            put_le(os, z.imag());
        }
}

KineticState read_kin(const std::string& path, GridPtr grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const std::exception&) {
        throw IoError(path + ": bad header");
    }
    const int n = h.at("grid").get<int>();
    const int M = h.at("M").get<int>();
    if (!grid) grid = make_grid(n, h["dealias_ratio"][0].get<int>(), h["dealias_ratio"][1].get<int>());
    if (grid->n() != n) throw GridMismatch(path + ": grid size differs");
    HermiteSpace S(M);
    KineticState s = KineticState::zero(grid, S, h.at("epsilon").get<double>());
    s.t = h.value("t", 0.0);
    for (SpectralField* F : {&s.f, &s.g, &s.E, &s.B})
        for (auto& z : F->coeffs()) {
            const double re = get_le(is);
            const double im = get_le(is);
            z = cplx(re, im);
        }
    if (!is) throw IoError(path + ": truncated coefficient block");
    return s;
}

}  // namespace vmblab
