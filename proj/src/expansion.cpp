#include "vmblab/expansion.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vmblab/error.hpp"

namespace vmblab {

namespace {

const MomentVectors& moment_vectors(const HermiteSpace& S) {
    thread_local int cached = -1;
    thread_local std::unique_ptr<MomentVectors> mv;
    if (cached != S.max_degree()) {
        mv = std::make_unique<MomentVectors>(S);
        cached = S.max_degree();
    }
    return *mv;
}

SpectralField zero_mean(SpectralField f) {
    for (int c = 0; c < f.rank(); ++c) f.at(c, 0) = 0;
    return f;
}

// sum_j d_j <F, v_i v_j sqrt(mu)>
SpectralField stress_divergence(const SpectralField& F, const MomentVectors& mv) {
    SpectralField out = SpectralField::vector(F.grid_ptr());
    for (int i = 0; i < 3; ++i) {
        SpectralField s = SpectralField::scalar(F.grid_ptr());
        for (int j = 0; j < 3; ++j) s += derivative(phase_moment(F, mv.vv[i][j]), j);
        out.set_component(i, s);
    }
    return out;
}

// Gamma(a, b) + Gamma(b, a)
SpectralField gamma_pair(const SpectralField& a, const SpectralField& b, const CollisionModel& C) {
    return phase_gamma(a, b, C) + phase_gamma(b, a, C);
}

FluidRates rates_difference(const FluidState& a, const FluidState& b, double h) {
    FluidRates r;
    r.du = (1.0 / h) * (b.u - a.u);
    r.dtheta = (1.0 / h) * (b.theta - a.theta);
    r.dsigma = (1.0 / h) * (b.sigma - a.sigma);
    return r;
}

SecondOrderKnown known_from_rates(const FluidState& s1, const FluidRates& r1, const CollisionModel& C) {
    const auto& mv = moment_vectors(C.space());
    SecondOrderKnown k;
    k.t = s1.t;
    k.micro = build_second_order_micro(s1, C);
    k.beta = second_order_beta(s1, k.micro.f, mv);
    k.u_comp = gradient(inverse_laplacian_zero_mean(zero_mean(r1.dtheta)));
    k.dtE1 = gradient(inverse_laplacian_zero_mean(zero_mean(r1.dsigma)));
    k.current = phase_vector_moment(k.micro.g, mv.v);
    const SpectralField dfm = second_order_micro_f_rate(s1, r1, C);
    const SpectralField E1 = s1.electric();
    SpectralField b = -1.0 * stress_divergence(dfm, mv);
    b += dealias_product(s1.sigma, k.dtE1);
    b += dealias_product(r1.dsigma, E1);
    k.dbeta = inverse_laplacian_zero_mean(divergence(b));
    return k;
}

}  // namespace

OrderFields build_first_order(const FluidState& s1, const HermiteSpace& S) {
    OrderFields o;
    o.f = phase_from_hydro(-1.0 * s1.theta, s1.u, s1.theta, S);
    o.g = phase_from_sigma(s1.sigma, S);
    o.E = s1.electric();
    o.B = SpectralField::vector(s1.u.grid_ptr());
    return o;
}

OrderFields first_order_rate(const FluidState& s1, const FluidRates& r1, const HermiteSpace& S) {
    OrderFields o;
    o.f = phase_from_hydro(-1.0 * r1.dtheta, r1.du, r1.dtheta, S);
    o.g = phase_from_sigma(r1.dsigma, S);
    o.E = gradient(inverse_laplacian_zero_mean(zero_mean(r1.dsigma)));
    o.B = SpectralField::vector(s1.u.grid_ptr());
    return o;
}

SecondOrderMicro build_second_order_micro(const FluidState& s1, const CollisionModel& C) {
    const auto& S = C.space();
    const OrderFields o1 = build_first_order(s1, S);
    // Both right-hand sides are microscopic for a valid first order; the guards check it.
    SecondOrderMicro m;
    m.f = phase_invert_L(phase_gamma(o1.f, o1.f, C) - phase_transport(o1.f, S), C);
    SpectralField hg = phase_field_drive(o1.E, S) - phase_transport(o1.g, S);
    hg += phase_gamma(o1.g, o1.f, C);
    m.g = phase_invert_cal_L(hg, C);
    return m;
}

SpectralField second_order_micro_f_rate(const FluidState& s1, const FluidRates& r1, const CollisionModel& C) {
    const auto& S = C.space();
    const OrderFields o1 = build_first_order(s1, S);
    const OrderFields d1 = first_order_rate(s1, r1, S);
    return phase_invert_L(phase_micro_p1(gamma_pair(o1.f, d1.f, C) - phase_transport(d1.f, S), S), C);
}

SpectralField second_order_beta(const FluidState& s1, const SpectralField& f2_micro, const MomentVectors& mv) {
    SpectralField b = dealias_product(s1.sigma, s1.electric()) - stress_divergence(f2_micro, mv);
    return inverse_laplacian_zero_mean(divergence(b));
}

SecondOrderKnown second_order_known(const std::vector<FluidState>& history, const CollisionModel& C,
                                    TimeDerivative mode) {
    if (mode == TimeDerivative::analytic) {
        if (history.empty()) throw InsufficientHistory("need at least one first-order time level");
        const FluidState& s = history.back();
        return known_from_rates(s, vnsf_rhs(s, C.transport()), C);
    }
    if (history.size() < 3) throw InsufficientHistory("centred differences need 3 stored time levels");
    const std::size_t n = history.size();
    const FluidState &a = history[n - 3], &s = history[n - 2], &b = history[n - 1];
    const double h = b.t - a.t;
    if (!(h > 0) || std::abs((s.t - a.t) - (b.t - s.t)) > 1e-9 * h)
        throw InsufficientHistory("time levels must be increasing and equally spaced");
    const FluidRates r = rates_difference(a, b, h);
    SecondOrderKnown k = known_from_rates(s, r, C);
    const auto& mv = moment_vectors(C.space());
    const SpectralField ba = second_order_beta(a, build_second_order_micro(a, C).f, mv);
    const SpectralField bb = second_order_beta(b, build_second_order_micro(b, C).f, mv);
    k.dbeta = (1.0 / h) * (bb - ba);
    return k;
}

OrderFields assemble_second_order(const FluidState& s1, const SecondOrderKnown& k, const LinearVNSFState& x,
                                  const CollisionModel& C) {
    const auto& S = C.space();
    const SpectralField u2 = leray_project(x.u) + k.u_comp;
    // rho2 = beta2 - theta2 away from k = 0; the mean of rho2 vanishes.
    SpectralField rho2 = k.beta - x.theta;
    rho2.at(0, 0) = 0;
    OrderFields o;
    o.f = phase_from_hydro(rho2, u2, x.theta, S) + k.micro.f;
    o.g = phase_from_sigma(x.sigma, S) + k.micro.g;
    LinearVNSFSources src = LinearVNSFSources::zero(s1.u.grid_ptr());
    src.current = k.current;
    src.dtE_prev = k.dtE1;
    o.E = electric_m(x, src);
    // Solenoidal part: with finite-difference rates dE1/dt + j2 is divergence-free
    // only up to the stencil error. hierarchy_residual reports the full mismatch.
    o.B = helmholtz_solve(leray_project(k.current + k.dtE1), SpectralField::scalar(s1.u.grid_ptr()), {0, 0, 0},
                          k.current.norm_l2() + k.dtE1.norm_l2());
    return o;
}

ThirdOrderMicro build_third_order_micro(const FluidState& s1, const OrderFields& o2, const CollisionModel& C) {
    const auto& S = C.space();
    const OrderFields o1 = build_first_order(s1, S);
    ThirdOrderMicro m;
    SpectralField hf = gamma_pair(o1.f, o2.f, C) - phase_transport(o2.f, S);
    hf -= phase_lorentz(o1.E, o1.B, o1.g, S);
    m.f = phase_invert_L(phase_micro_p1(hf, S), C);
    SpectralField hg = phase_field_drive(o2.E, S) - phase_transport(o2.g, S);
    hg -= phase_lorentz(o1.E, o1.B, o1.f, S);
    hg += phase_gamma(o1.g, o2.f, C);
    hg += phase_gamma(o2.g, o1.f, C);
    m.g = phase_invert_cal_L(phase_micro_p2(hg, S), C);
    return m;
}

LinearRates second_order_rhs(const FluidState& s1, const SecondOrderKnown& k, const LinearVNSFState& x,
                             const CollisionModel& C) {
    const auto& S = C.space();
    const auto& mv = moment_vectors(S);
    const OrderFields o1 = build_first_order(s1, S);
    const OrderFields o2 = assemble_second_order(s1, k, x, C);
    const ThirdOrderMicro m3 = build_third_order_micro(s1, o2, C);

    // Hydrodynamic projections of the eps^4 equations; the unknown hydro part of
    // f3 only enters through gradients (killed by P0) and div u3 (eliminated).
    SpectralField phi = phase_transport(m3.f, S);
    phi += phase_lorentz(o1.E, o1.B, o2.g, S);
    phi += phase_lorentz(o2.E, o2.B, o1.g, S);
    const SpectralField psi = phase_transport(m3.g, S);

    LinearRates r;
    r.du = -1.0 * leray_project(phase_vector_moment(phi, mv.v));
    const SpectralField mass = phase_moment(phi, mv.one);
    const SpectralField energy = phase_moment(phi, mv.energy);
    // (5/2) d theta2 = d beta2 - <phi, |v|^2/2> + (5/2) <phi, 1> for k != 0
    r.dtheta = 0.4 * (k.dbeta - energy + 2.5 * mass);
    r.dtheta.at(0, 0) = (2.0 / 3.0) * (-energy.at(0, 0) + 1.5 * mass.at(0, 0));
    r.dsigma = -1.0 * phase_moment(psi, mv.one);
    const SpectralField j3 = phase_vector_moment(m3.g, mv.v);
    for (int a = 0; a < 3; ++a) r.de[a] = -j3.at(a, 0).real();
    return r;
}

LinearVNSFSources assemble_R2_sources(const FluidState& s1, const SecondOrderKnown& k, const CollisionModel& C) {
    const GridPtr& g = s1.u.grid_ptr();
    const LinearRates r0 = second_order_rhs(s1, k, LinearVNSFState::zero(g), C);
    LinearVNSFSources src;
    src.R_u = r0.du;
    src.R_theta = r0.dtheta;
    src.R_sigma = r0.dsigma;
    src.ell = r0.de;
    src.dtE_prev = k.dtE1;
    src.dtB_prev = SpectralField::vector(g);
    src.current = k.current;
    return src;
}

LinearVNSFSources assemble_R2_sources(const std::vector<FluidState>& history, const CollisionModel& C,
                                      TimeDerivative mode) {
    const SecondOrderKnown k = second_order_known(history, C, mode);
    const FluidState& s = mode == TimeDerivative::analytic ? history.back() : history[history.size() - 2];
    return assemble_R2_sources(s, k, C);
}

LinearVNSFState initial_second_order(const FluidState& s1, const SecondOrderInit& init) {
    LinearVNSFState x = LinearVNSFState::zero(s1.u.grid_ptr());
    const SpectralField E1 = s1.electric();
    x.theta.at(0, 0) = -inner(E1, E1) / (3.0 * box_volume);
    x.e_mean = init.e_mean;
    x.t = s1.t;
    return x;
}

HierarchyResidual hierarchy_residual(const FluidState& s1, const LinearVNSFState& x2, const CollisionModel& C) {
    const auto& S = C.space();
    const FluidRates r1 = vnsf_rhs(s1, C.transport());
    const SecondOrderKnown k = known_from_rates(s1, r1, C);
    const OrderFields o1 = build_first_order(s1, S);
    const OrderFields d1 = first_order_rate(s1, r1, S);
    const OrderFields o2 = assemble_second_order(s1, k, x2, C);
    const Mat Lm = C.nu0() * (Mat::Identity(S.size(), S.size()) - p1_matrix(S));
    const Mat cLm = C.nu0() * (Mat::Identity(S.size(), S.size()) - p2_matrix(S));

    HierarchyResidual h;
    h.f1_kernel = apply_velocity(o1.f, Lm).norm_l2();
    h.g1_kernel = apply_velocity(o1.g, cLm).norm_l2();

    SpectralField rf2 = phase_transport(o1.f, S) + apply_velocity(o2.f, Lm);
    rf2 -= phase_gamma(o1.f, o1.f, C);
    h.f2 = rf2.norm_l2();
    SpectralField rg2 = phase_transport(o1.g, S) - phase_field_drive(o1.E, S);
    rg2 += apply_velocity(o2.g, cLm);
    rg2 -= phase_gamma(o1.g, o1.f, C);
    h.g2 = rg2.norm_l2();

    // eps^3: d_t f1 + v.grad f2 + Lor(E1, B1; g1) + L f3 - 2 Gamma_sym(f1, f2) = 0
    SpectralField rf3 = d1.f + phase_transport(o2.f, S);
    rf3 += phase_lorentz(o1.E, o1.B, o1.g, S);
    rf3 -= gamma_pair(o1.f, o2.f, C);
    h.f3_hydro = apply_velocity(rf3, p1_matrix(S)).norm_l2();
    SpectralField rg3 = d1.g + phase_transport(o2.g, S);
    rg3 -= phase_field_drive(o2.E, S);
    rg3 += phase_lorentz(o1.E, o1.B, o1.f, S);
    rg3 -= phase_gamma(o1.g, o2.f, C);
    rg3 -= phase_gamma(o2.g, o1.f, C);
    h.g3_hydro = apply_velocity(rg3, p2_matrix(S)).norm_l2();

    const auto& mv = moment_vectors(S);
    h.maxwell2 = (curl(o2.B) - d1.E - phase_vector_moment(o2.g, mv.v)).norm_l2();
    return h;
}

ExpansionSnapshot make_snapshot(const FluidState& s1, const LinearVNSFState& x2, const CollisionModel& C,
                                int n_max) {
    if (n_max < 1 || n_max > 2) throw OrderTooHigh("expansion orders 1 and 2 are constructed");
    ExpansionSnapshot snap;
    snap.t = s1.t;
    snap.order1 = s1;
    snap.order2 = x2;
    snap.fields.push_back(build_first_order(s1, C.space()));
    if (n_max >= 2) {
        const SecondOrderKnown k = second_order_known({s1}, C);
        snap.fields.push_back(assemble_second_order(s1, k, x2, C));
    }
    return snap;
}

ExpansionSet build_full_second_order(const FluidState& s1_init, const CollisionModel& C, double dt, int steps,
                                     int record_every, int n_max, SecondOrderInit init) {
    if (!(dt > 0)) throw ConfigInvalid("dt must be positive");
    if (steps < 0 || record_every < 1) throw ConfigInvalid("steps must be >= 0 and record_every >= 1");
    if (n_max < 1 || n_max > 2) throw OrderTooHigh("expansion orders 1 and 2 are constructed");
    const Transport& tc = C.transport();
    ExpansionSet set;
    set.n_max = n_max;
    FluidState s = s1_init;
    LinearVNSFState x = initial_second_order(s, init);
    set.snapshots.push_back(make_snapshot(s, x, C, n_max));
    if (n_max < 2) {
        for (int i = 1; i <= steps; ++i) {
            step_nonlinear_vnsf(s, dt, tc);
            if (i % record_every == 0 || i == steps) set.snapshots.push_back(make_snapshot(s, x, C, 1));
        }
        return set;
    }
    LinearVNSFSources src0 = assemble_R2_sources(s, second_order_known({s}, C), C);
    for (int i = 1; i <= steps; ++i) {
        FluidState s_next = s;
        step_nonlinear_vnsf(s_next, dt, tc);
        LinearVNSFSources src1 = assemble_R2_sources(s_next, second_order_known({s_next}, C), C);
        step_linear_vnsf(x, dt, s, src0, s_next, src1, tc);
        x.t = s_next.t;
        s = std::move(s_next);
        src0 = std::move(src1);
        if (i % record_every == 0 || i == steps) set.snapshots.push_back(make_snapshot(s, x, C, n_max));
    }
    return set;
}

const ExpansionSnapshot& ExpansionSet::at(double t) const {
    if (snapshots.empty()) throw InvariantViolation("expansion set has no snapshots");
    std::size_t best = 0;
    for (std::size_t i = 1; i < snapshots.size(); ++i)
        if (std::abs(snapshots[i].t - t) < std::abs(snapshots[best].t - t)) best = i;
    return snapshots[best];
}

void ExpansionSet::save(const std::string& dir, const CollisionModel& C) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
    nlohmann::json man;
    man["format"] = "vmblab-expansion";
    man["n_max"] = n_max;
    man["max_degree"] = C.space().max_degree();
    man["transport"] = {{"nu0", C.nu0()},
                        {"frequency_mode", to_string(C.mode())},
                        {"eta", C.transport().eta},
                        {"kappa", C.transport().kappa},
                        {"alpha", C.transport().alpha}};
    man["provenance"] = provenance.empty() ? nlohmann::json::object() : nlohmann::json::parse(provenance);
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto& sn = snapshots[i];
        nlohmann::json js;
        js["t"] = sn.t;
        nlohmann::json orders = nlohmann::json::array();
        for (std::size_t m = 0; m < sn.fields.size(); ++m) {
            nlohmann::json o;
            o["order"] = m + 1;
            const OrderFields& of = sn.fields[m];
            const std::pair<const char*, const SpectralField*> parts[] = {
                {"f", &of.f}, {"g", &of.g}, {"E", &of.E}, {"B", &of.B}};
            for (const auto& [name, fld] : parts) {
                std::ostringstream fn;
                fn << "s" << i << "_" << name << (m + 1) << ".specf";
                write_specf((fs::path(dir) / fn.str()).string(), *fld);
                o[name] = fn.str();
            }
            orders.push_back(o);
        }
        js["orders"] = orders;
        js["e_mean"] = sn.order2.e_mean;
        snaps.push_back(js);
    }
    man["snapshots"] = snaps;
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << man.dump(2) << "\n";
}

ExpansionSet ExpansionSet::load(const std::string& dir, const CollisionModel& C, GridPtr grid) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("cannot read manifest in " + dir);
    nlohmann::json man;
    try {
        in >> man;
    } catch (const std::exception& e) {
        throw IoError(std::string("bad manifest: ") + e.what());
    }
    if (man.value("format", "") != "vmblab-expansion") throw IoError("not an expansion manifest");
    if (man.value("max_degree", -1) != C.space().max_degree())
        throw GridMismatch("manifest Hermite degree differs from the model");
    ExpansionSet set;
    set.n_max = man.at("n_max").get<int>();
    if (man.contains("provenance")) set.provenance = man["provenance"].dump();
    for (const auto& js : man.at("snapshots")) {
        ExpansionSnapshot sn;
        sn.t = js.at("t").get<double>();
        for (const auto& o : js.at("orders")) {
            OrderFields of;
            SpectralField* dst[] = {&of.f, &of.g, &of.E, &of.B};
            const char* names[] = {"f", "g", "E", "B"};
            for (int p = 0; p < 4; ++p) {
                *dst[p] = read_specf((fs::path(dir) / o.at(names[p]).get<std::string>()).string(), grid);
                if (!grid) grid = dst[p]->grid_ptr();
            }
            sn.fields.push_back(std::move(of));
        }
        const Moments m1 = moments(sn.fields.at(0).f, sn.fields.at(0).g, C);
        sn.order1.u = m1.u;
        sn.order1.theta = m1.theta;
        sn.order1.sigma = m1.sigma;
        sn.order1.t = sn.t;
        sn.order2 = LinearVNSFState::zero(grid);
        if (sn.fields.size() >= 2) {
            const Moments m2 = moments(sn.fields[1].f, sn.fields[1].g, C);
            sn.order2.u = leray_project(m2.u);
            sn.order2.theta = m2.theta;
            sn.order2.sigma = m2.sigma;
            sn.order2.e_mean = js.at("e_mean").get<std::array<double, 3>>();
        }
        sn.order2.t = sn.t;
        set.snapshots.push_back(std::move(sn));
    }
    return set;
}

}  // namespace vmblab
