#include "vmblab/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vmblab/error.hpp"
#include "vmblab/phase.hpp"

namespace vmblab {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

void check_order(const Grid& g, int N) {
    if (N < 0) throw ConfigInvalid("derivative order must be nonnegative");
    if (N > max_energy_order(g)) throw OrderTooHigh("derivative order exceeds n/2 on this grid");
}

// W_j(n) = sum_{i<=j} (1 + |n|)^i
Vec degree_weights(const HermiteSpace& S, int j) {
    Vec w(S.size());
    for (int n = 0; n < S.size(); ++n) {
        const double b = 1.0 + S.degree(n);
        double acc = 0, p = 1;
        for (int i = 0; i <= j; ++i, p *= b) acc += p;
        w[n] = acc;
    }
    return w;
}

// Spatial weights for one mode: total(|gamma| <= N) and exact(|gamma| = s).
struct SpatialWeights {
    double total;
    std::vector<double> exact;
};

SpatialWeights spatial_weights(const std::array<int, 3>& k, int N) {
    SpatialWeights w;
    w.exact.resize(N + 1);
    double prev = 0;
    for (int s = 0; s <= N; ++s) {
        const double cur = derivative_weight(k, s);
        w.exact[s] = cur - prev;
        prev = cur;
    }
    w.total = prev;
    return w;
}

// Quadratic weight matrices of the plain energy (Nf, Ng) and of the dissipation
// (Qf, Qg) for one mode; real symmetric K x K.
struct ModeWeights {
    Mat Ef, Eg, Df, Dg;
    double field;
};

// W == nullptr skips the dissipation weights.
ModeWeights mode_weights(const std::array<int, 3>& k, int N, const HermiteSpace& S, const Mat* W, double eps) {
    const int K = S.size();
    const Mat I = Mat::Identity(K, K);
    const Mat P1 = p1_matrix(S), P2 = p2_matrix(S);
    const Mat Q1 = I - P1, Q2 = I - P2;
    const SpatialWeights sw = spatial_weights(k, N);
    ModeWeights m;
    m.field = sw.total;
    m.Ef = sw.total * P1;
    m.Eg = sw.total * P2;
    m.Df = sw.total * P1;
    m.Dg = sw.total * P2;
    for (int s = 0; s <= N; ++s) {
        if (sw.exact[s] == 0) continue;
        const Vec w = degree_weights(S, N - s);
        const Mat Dw = w.asDiagonal();
        m.Ef += sw.exact[s] * Q1 * Dw * Q1;
        m.Eg += sw.exact[s] * Q2 * Dw * Q2;
        if (!W) continue;
        const Vec rw = w.cwiseSqrt();
        const Mat Nu = rw.asDiagonal() * *W * rw.asDiagonal();
        m.Df += (sw.exact[s] / (eps * eps)) * Q1 * Nu * Q1;
        m.Dg += (sw.exact[s] / (eps * eps)) * Q2 * Nu * Q2;
    }
    return m;
}

// Per-call tables: projectors, degree weights W_j and their nu-weighted forms.
struct WeightTables {
    Mat P1, P2;
    std::vector<Vec> w;   // w[j] = W_j
    std::vector<Mat> nu;  // diag(sqrt w_j) W diag(sqrt w_j), empty for diagonal W
    bool diagonal_nu = true;
    double nu_diag = 0;
    WeightTables(const HermiteSpace& S, int N, const Mat* W) : P1(p1_matrix(S)), P2(p2_matrix(S)) {
        for (int j = 0; j <= N; ++j) w.push_back(degree_weights(S, j));
        if (!W) return;
        const Mat off = *W - Mat(W->diagonal().asDiagonal());
        diagonal_nu = off.norm() == 0 && (W->diagonal().array() == (*W)(0, 0)).all();
        nu_diag = (*W)(0, 0);
        if (diagonal_nu) return;
        for (int j = 0; j <= N; ++j) {
            const Vec rw = w[j].cwiseSqrt();
            nu.push_back(rw.asDiagonal() * *W * rw.asDiagonal());
        }
    }
};

struct Split {
    double hydro = 0, micro = 0;
};

// hydro: total |P x|^2; micro: sum_s exact_s m^* M_{N-s} m with m = (I - P) x.
Split split_mode(const SpectralField& F, std::size_t idx, const Mat& P, const SpatialWeights& sw,
                 const WeightTables& T, bool dissipative, VectorXcd& x, VectorXcd& m) {
    const int K = F.rank();
    for (int n = 0; n < K; ++n) x[n] = F.at(n, idx);
    m.noalias() = P * x;
    Split r;
    r.hydro = sw.total * m.squaredNorm();
    m = x - m;
    const int N = int(sw.exact.size()) - 1;
    for (int s = 0; s <= N; ++s) {
        if (sw.exact[s] == 0) continue;
        double q;
        if (!dissipative || T.diagonal_nu) {
            q = 0;
            const Vec& w = T.w[N - s];
            for (int n = 0; n < K; ++n) q += w[n] * std::norm(m[n]);
            if (dissipative) q *= T.nu_diag;
        } else {
            q = (m.adjoint() * (T.nu[N - s] * m))(0, 0).real();
        }
        r.micro += sw.exact[s] * q;
    }
    return r;
}

}  // namespace

int max_energy_order(const Grid& g) { return g.n() / 2; }

double instant_energy(const KineticState& s, int N, const HermiteSpace& S, EnergyTerms* terms) {
    const Grid& g = s.grid();
    check_order(g, N);
    const WeightTables T(S, N, nullptr);
    EnergyTerms t;
    VectorXcd x(S.size()), m(S.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const SpatialWeights sw = spatial_weights(g.wavevector(idx), N);
        const Split sf = split_mode(s.f, idx, T.P1, sw, T, false, x, m);
        const Split sg = split_mode(s.g, idx, T.P2, sw, T, false, x, m);
        t.hydro_f += sf.hydro;
        t.micro_f += sf.micro;
        t.hydro_g += sg.hydro;
        t.micro_g += sg.micro;
        for (int a = 0; a < 3; ++a) {
            t.field_E += sw.total * std::norm(s.E.at(a, idx));
            t.field_B += sw.total * std::norm(s.B.at(a, idx));
        }
    }
    for (double* v : {&t.hydro_f, &t.micro_f, &t.hydro_g, &t.micro_g, &t.field_E, &t.field_B}) *v *= box_volume;
    if (terms) *terms = t;
    return t.total();
}

double dissipation_rate(const KineticState& s, int N, const CollisionModel& C, EnergyTerms* terms) {
    const Grid& g = s.grid();
    check_order(g, N);
    const auto& S = C.space();
    const WeightTables T(S, N, &C.nu_weight());
    EnergyTerms t;
    VectorXcd x(S.size()), m(S.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const SpatialWeights sw = spatial_weights(g.wavevector(idx), N);
        const Split sf = split_mode(s.f, idx, T.P1, sw, T, true, x, m);
        const Split sg = split_mode(s.g, idx, T.P2, sw, T, true, x, m);
        t.hydro_f += sf.hydro;
        t.micro_f += sf.micro;
        t.hydro_g += sg.hydro;
        t.micro_g += sg.micro;
    }
    const double e2 = s.epsilon * s.epsilon;
    t.micro_f /= e2;
    t.micro_g /= e2;
    for (double* v : {&t.hydro_f, &t.micro_f, &t.hydro_g, &t.micro_g}) *v *= box_volume;
    if (terms) *terms = t;
    return t.total();
}

// ---------------------------------------------------------------------------

namespace {

// Solves A^* X + X A = -Q for Hurwitz A by the complex Schur form.
MatrixXcd solve_lyapunov(const MatrixXcd& A, const MatrixXcd& Q) {
    const int n = int(A.rows());
    Eigen::ComplexSchur<MatrixXcd> schur(A);
    const MatrixXcd& U = schur.matrixU();
    const MatrixXcd& T = schur.matrixT();
    for (int i = 0; i < n; ++i)
        if (!(T(i, i).real() < 0))
            throw InvariantViolation("linear generator has a non-decaying mode on the constrained subspace");
    const MatrixXcd C = -(U.adjoint() * Q * U);
    MatrixXcd Y = MatrixXcd::Zero(n, n);
    const MatrixXcd Ts = T.adjoint();  // lower triangular
    for (int j = 0; j < n; ++j) {
        VectorXcd rhs = C.col(j);
        for (int l = 0; l < j; ++l) rhs -= Y.col(l) * T(l, j);
        // (T^* + T_jj) y = rhs, forward substitution
        VectorXcd y(n);
        for (int i = 0; i < n; ++i) {
            cplx acc = rhs[i];
            for (int l = 0; l < i; ++l) acc -= Ts(i, l) * y[l];
            y[i] = acc / (Ts(i, i) + T(j, j));
        }
        Y.col(j) = y;
    }
    MatrixXcd X = U * Y * U.adjoint();
    return 0.5 * (X + X.adjoint());
}

// Orthonormal basis of the null space of the rows of M.
MatrixXcd null_basis(const MatrixXcd& M, int n) {
    Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeFullV);
    const int r = int(M.rows());
    return svd.matrixV().rightCols(n - r);
}

// Orthonormal basis of the range of a real projector.
MatrixXcd range_basis(const Mat& P) {
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    std::vector<int> cols;
    for (int i = 0; i < P.rows(); ++i)
        if (es.eigenvalues()[i] > 0.5) cols.push_back(i);
    MatrixXcd Z(P.rows(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) Z.col(c) = es.eigenvectors().col(cols[c]).cast<cplx>();
    return Z;
}

struct BlockResult {
    MatrixXcd G;
    double lo, hi;
};

// Lyapunov form on span(Z) plus the plain weight on the excluded projector X.
BlockResult lyapunov_block(const MatrixXcd& A, const MatrixXcd& Q, const MatrixXcd& Nw, const MatrixXcd& Z,
                           const MatrixXcd& X) {
    const MatrixXcd Ar = Z.adjoint() * A * Z;
    const MatrixXcd Qr = Z.adjoint() * Q * Z;
    const MatrixXcd H = solve_lyapunov(Ar, Qr);
    const MatrixXcd Nr = Z.adjoint() * Nw * Z;
    // generalized eigenvalues of (H, Nr)
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Nr);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= 0) throw InvariantViolation("energy weight is not positive on the constrained subspace");
    const MatrixXcd Wi = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eh(Wi * H * Wi);
    BlockResult b;
    b.lo = eh.eigenvalues().minCoeff();
    b.hi = eh.eigenvalues().maxCoeff();
    if (b.lo <= 0) throw InvariantViolation("Lyapunov form is not positive definite");
    b.G = Z * H * Z.adjoint();
    if (X.size() > 0) {
        b.G += X.adjoint() * Nw * X;
        b.lo = std::min(b.lo, 1.0);
        b.hi = std::max(b.hi, 1.0);
    }
    return b;
}

}  // namespace

LyapunovEnergy::LyapunovEnergy(GridPtr grid, std::shared_ptr<const CollisionModel> model, double epsilon, int N)
    : grid_(std::move(grid)), model_(std::move(model)), eps_(epsilon), N_(N) {
    check_order(*grid_, N);
    const auto& S = model_->space();
    const int K = S.size();
    const Mat P1 = p1_matrix(S), P2 = p2_matrix(S);
    const Mat I = Mat::Identity(K, K);
    for (std::size_t idx : grid_->resolved_modes())
        if (grid_->conjugate_index(idx) >= idx) modes_.push_back(idx);
    Hf_.resize(modes_.size());
    Hg_.resize(modes_.size());
    c_lo_ = 1e300;
    c_hi_ = 0;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const auto k = grid_->wavevector(modes_[m]);
        const bool zero = k[0] == 0 && k[1] == 0 && k[2] == 0;
        const ModeWeights w = mode_weights(k, N, model_->space(), &model_->nu_weight(), eps_);

        const MatrixXcd Af = kinetic_f_generator(k, *model_, eps_);
        MatrixXcd Zf, Xf;
        if (zero) {
            Zf = range_basis(I - P1);
            Xf = P1.cast<cplx>();
        } else {
            Zf = MatrixXcd::Identity(K, K);
        }
        const BlockResult bf = lyapunov_block(Af, w.Df.cast<cplx>(), w.Ef.cast<cplx>(), Zf, Xf);
        Hf_[m] = bf.G;

        const MatrixXcd Ag = kinetic_g_generator(k, *model_, eps_);
        const int n = K + 6, iE = K, iB = K + 3;
        MatrixXcd Dg = MatrixXcd::Zero(n, n), Eg = MatrixXcd::Zero(n, n);
        Dg.topLeftCorner(K, K) = w.Dg.cast<cplx>();
        Eg.topLeftCorner(K, K) = w.Eg.cast<cplx>();
        for (int a = 0; a < 6; ++a) Eg(K + a, K + a) = w.field;
        MatrixXcd Zg, Xg;
        if (zero) {
            // mean charge and mean B are conserved; keep (g micro, E)
            std::vector<int> keep;
            for (int i = 1; i < K; ++i) keep.push_back(i);
            for (int a = 0; a < 3; ++a) keep.push_back(iE + a);
            Zg = MatrixXcd::Zero(n, keep.size());
            for (std::size_t c = 0; c < keep.size(); ++c) Zg(keep[c], c) = 1;
            Xg = MatrixXcd::Zero(n, n);
            Xg(0, 0) = 1;
            for (int a = 0; a < 3; ++a) Xg(iB + a, iB + a) = 1;
        } else {
            // i k.E = g_0 and k.B = 0
            MatrixXcd Cst = MatrixXcd::Zero(2, n);
            Cst(0, 0) = -1;
            for (int a = 0; a < 3; ++a) {
                Cst(0, iE + a) = cplx(0, k[a]);
                Cst(1, iB + a) = double(k[a]);
            }
            Zg = null_basis(Cst, n);
        }
        const BlockResult bg = lyapunov_block(Ag, Dg, Eg, Zg, Xg);
        Hg_[m] = bg.G;
        c_lo_ = std::min({c_lo_, bf.lo, bg.lo});
        c_hi_ = std::max({c_hi_, bf.hi, bg.hi});
    }
}

double LyapunovEnergy::operator()(const KineticState& s) const {
    if (!s.grid().same_as(*grid_)) throw GridMismatch("state grid differs from the Lyapunov energy grid");
    const int K = s.modes();
    double e = 0;
    VectorXcd xf(K), xg(K + 6);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const std::size_t idx = modes_[m];
        const double mult = grid_->conjugate_index(idx) == idx ? 1.0 : 2.0;
        for (int n = 0; n < K; ++n) {
            xf[n] = s.f.at(n, idx);
            xg[n] = s.g.at(n, idx);
        }
        for (int a = 0; a < 3; ++a) {
            xg[K + a] = s.E.at(a, idx);
            xg[K + 3 + a] = s.B.at(a, idx);
        }
        e += mult * ((xf.adjoint() * Hf_[m] * xf)(0, 0).real() + (xg.adjoint() * Hg_[m] * xg)(0, 0).real());
    }
    return box_volume * e;
}

EnergyReport energy_report(const KineticState& s, int N, const CollisionModel& C, const LyapunovEnergy* lyap) {
    EnergyReport r;
    r.t = s.t;
    r.N = N;
    r.E_N = instant_energy(s, N, C.space(), &r.energy_terms);
    r.D_N = dissipation_rate(s, N, C, &r.dissipation_terms);
    if (lyap) r.E_lyap = (*lyap)(s);
    r.conservation = conserved(s, C.space());
    return r;
}

std::vector<Violation> energy_inequality_monitor(const std::vector<EnergyReport>& reports, double tol_rel,
                                                 double tol_abs, bool use_lyapunov) {
    if (reports.size() < 3) throw TooFewSamples("energy monitor needs at least 3 reports");
    auto E = [&](std::size_t i) { return use_lyapunov ? reports[i].E_lyap : reports[i].E_N; };
    if (use_lyapunov)
        for (const auto& r : reports)
            if (r.E_lyap < 0) throw InvariantViolation("report lacks the Lyapunov energy");
    const double tol = tol_rel * E(0) + tol_abs;
    std::vector<Violation> out;
    for (std::size_t i = 1; i + 1 < reports.size(); ++i) {
        const double dt = reports[i + 1].t - reports[i - 1].t;
        if (!(dt > 0)) throw InvariantViolation("reports must have increasing times");
        const double v = (E(i + 1) - E(i - 1)) / dt + reports[i].D_N;
        if (v > tol) out.push_back({i, reports[i].t, v, tol});
    }
    return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v, DecayKind kind, double k) {
    if (t.size() != v.size()) throw ConfigInvalid("time and value series differ in length");
    if (t.size() < 10) throw TooFewSamples("decay fit needs at least 10 samples");
    if (kind == DecayKind::polynomial && !(k > 0)) throw ConfigInvalid("polynomial decay needs k > 0");
    const std::size_t n = t.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0)) throw NonPositiveValues("decay fit needs positive values");
        x[i] = kind == DecayKind::exponential ? t[i] : std::log1p(t[i] / k);
        y[i] = std::log(v[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw ConfigInvalid("decay fit needs distinct sample times");
    const double b = sxy / sxx, a = my - b * mx;
    double ss = 0, ymin = y[0], ymax = y[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (a + b * x[i]);
        ss += e * e;
        ymin = std::min(ymin, y[i]);
        ymax = std::max(ymax, y[i]);
    }
    DecayFit f;
    f.rate = -b;
    f.constant = std::exp(a);
    const double range = ymax - ymin;
    f.residual = std::sqrt(ss / n) / (range > 0 ? range : 1.0);
    return f;
}

// ---------------------------------------------------------------------------

namespace {

// Monomials 1, v_i, v_i v_j (i <= j), v_i |v|^2 times sqrt(mu) and their dual basis.
struct MonomialBasis {
    Mat M, dual;  // K x 13
    int one = 0;
    std::array<int, 3> lin{}, cub{};
    std::array<std::array<int, 3>, 3> quad{};
    explicit MonomialBasis(const HermiteSpace& S) {
        const int K = S.size();
        M = Mat::Zero(K, 13);
        one = 0;
        int c = 1;
        for (int i = 0; i < 3; ++i) lin[i] = c++;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) quad[i][j] = quad[j][i] = c++;
        for (int i = 0; i < 3; ++i) cub[i] = c++;
        Quadrature3 q(S.max_degree() + 3);
        for (std::size_t p = 0; p < q.nodes.size(); ++p) {
            const auto& v = q.nodes[p];
            const Vec h = q.weights[p] * S.poly_values(v);
            const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            M.col(one) += h;
            for (int i = 0; i < 3; ++i) {
                M.col(lin[i]) += v[i] * h;
                M.col(cub[i]) += v[i] * r2 * h;
                for (int j = i; j < 3; ++j) M.col(quad[i][j]) += v[i] * v[j] * h;
            }
        }
        dual = M * (M.transpose() * M).inverse();
    }
};

double l2_of(const std::vector<SpectralField>& fs) {
    double s = 0;
    for (const auto& f : fs) s += std::pow(f.norm_l2(), 2);
    return std::sqrt(s);
}

}  // namespace

std::map<std::string, double> macroscopic_residuals(const std::vector<KineticState>& levels,
                                                    const CollisionModel& C) {
    if (levels.size() < 3) throw InsufficientHistory("macroscopic residuals need 3 time levels");
    const KineticState &sm = levels[levels.size() - 3], &s = levels[levels.size() - 2],
                       &sp = levels[levels.size() - 1];
    const double h = sp.t - sm.t;
    if (!(h > 0) || std::abs((s.t - sm.t) - (sp.t - s.t)) > 1e-9 * h)
        throw InsufficientHistory("time levels must be increasing and equally spaced");
    const auto& S = C.space();
    const double eps = s.epsilon;
    const MomentVectors mv(S);
    const MonomialBasis mb(S);

    const SpectralField ft = (1.0 / h) * (sp.f - sm.f);
    const SpectralField gt = (1.0 / h) * (sp.g - sm.g);
    SpectralField h1 = (1.0 / (eps * eps)) * phase_gamma(s.f, s.f, C);
    h1.axpy(-1.0 / eps, phase_lorentz(s.E, s.B, s.g, S));
    SpectralField h2 = (1.0 / (eps * eps)) * phase_gamma(s.g, s.f, C);
    h2.axpy(-1.0 / eps, phase_lorentz(s.E, s.B, s.f, S));

    const SpectralField mf = phase_micro_p1(s.f, S), mg = phase_micro_p2(s.g, S);
    const SpectralField mft = phase_micro_p1(ft, S), mgt = phase_micro_p2(gt, S);

    // a, b, c, d with P1 f = (a + b.v + c|v|^2) sqrt(mu), P2 g = d sqrt(mu)
    const Moments m = moments(s.f, s.g, C);
    const SpectralField a = m.rho - 1.5 * m.theta, c = 0.5 * m.theta;
    const SpectralField& b = m.u;
    const SpectralField& d = m.sigma;
    const Moments mt = moments(ft, gt, C);
    const SpectralField at = mt.rho - 1.5 * mt.theta, ct = 0.5 * mt.theta;
    const SpectralField& bt = mt.u;
    const SpectralField& dt = mt.sigma;

    std::map<std::string, double> r;
    // local conservation laws
    const SpectralField vgrad_mf = phase_transport(mf, S);
    const SpectralField vgrad_mg = phase_transport(mg, S);
    const Vec w_a = 2.5 * mv.one - mv.energy;               // (5/2 - |v|^2/2)
    const Vec w_c = (1.0 / 3.0) * mv.energy - 0.5 * mv.one;  // (|v|^2/6 - 1/2)
    const SpectralField e2 = 2.0 * phase_moment(vgrad_mf, mv.energy);  // <v.grad micro, |v|^2 sqrt(mu)>
    r["cons_a"] = (at - (0.5 / eps) * e2 - phase_moment(h1, w_a)).norm_l2();
    r["cons_c"] =
        (ct + (1.0 / (3.0 * eps)) * divergence(b) + (1.0 / (6.0 * eps)) * e2 - phase_moment(h1, w_c)).norm_l2();
    SpectralField rb = bt + (1.0 / eps) * gradient(a + 5.0 * c);
    rb += (1.0 / eps) * phase_vector_moment(vgrad_mf, mv.v);
    rb -= phase_vector_moment(h1, mv.v);
    r["cons_b"] = rb.norm_l2();
    r["cons_d"] = (dt + (1.0 / eps) * phase_moment(vgrad_mg, mv.one) - phase_moment(h2, mv.one)).norm_l2();

    // macroscopic equations: LHS from (a, b, c, d, E), RHS = l + eps h through the dual basis
    SpectralField rhs_f = -1.0 * (eps * mft + vgrad_mf);
    rhs_f.axpy(-C.nu0() / eps, mf);
    rhs_f.axpy(eps, h1);
    SpectralField rhs_g = -1.0 * (eps * mgt + vgrad_mg);
    rhs_g.axpy(-C.nu0() / eps, mg);
    rhs_g.axpy(eps, h2);
    auto coef_f = [&](int col) { return phase_moment(rhs_f, mb.dual.col(col)); };
    auto coef_g = [&](int col) { return phase_moment(rhs_g, mb.dual.col(col)); };

    std::vector<SpectralField> rc, rbi, rbij, rai, re;
    for (int i = 0; i < 3; ++i) {
        rc.push_back(derivative(c, i) - coef_f(mb.cub[i]));
        rbi.push_back(eps * ct + derivative(b.component(i), i) - coef_f(mb.quad[i][i]));
        rai.push_back(eps * bt.component(i) + derivative(a, i) - coef_f(mb.lin[i]));
        re.push_back(derivative(d, i) - s.E.component(i) - coef_g(mb.lin[i]));
        for (int j = i + 1; j < 3; ++j)
            rbij.push_back(derivative(b.component(j), i) + derivative(b.component(i), j) - coef_f(mb.quad[i][j]));
    }
    r["c"] = l2_of(rc);
    r["bi"] = l2_of(rbi);
    r["bij"] = l2_of(rbij);
    r["ai"] = l2_of(rai);
    r["a"] = (eps * at - coef_f(mb.one)).norm_l2();
    r["d"] = (eps * dt - coef_g(mb.one)).norm_l2();
    r["e"] = l2_of(re);
    return r;
}

ConservationDrift conservation_drift(const Conserved& a, const Conserved& b) {
    ConservationDrift d;
    d.mass = std::abs(b.mass - a.mass);
    d.charge = std::abs(b.charge - a.charge);
    for (int i = 0; i < 3; ++i) d.momentum = std::max(d.momentum, std::abs(b.momentum[i] - a.momentum[i]));
    d.energy = std::abs(b.energy - a.energy);
    return d;
}

}  // namespace vmblab
