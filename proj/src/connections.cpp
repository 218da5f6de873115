#include "casmon/connections.hpp"

#include <random>

namespace casmon {

Cx ConnectionSpec::form_value(const Log& l, const Vec& y) const {
    Cx acc = 0;
    for (int c = 0; c < nvars(); ++c) acc += l.grad(c) * y(c);
    return acc;
}

LinOp ConnectionSpec::coefficient(int c, const Vec& y) const {
    LinOp out;
    for (const auto& l : logs)
        if (std::abs(l.grad(c)) > 1e-14) out += l.op.scaled(l.grad(c) / form_value(l, y));
    if (coupled) {
        int ring = scale.ring_order();
        if (c < nz) {
            Vec mu = y.segment(nz, rank);
            Mat m = rep->leg(c, rep->cartan_action_factor_cx(c, mu));
            out += LinOp::ad(Series::constant(ring, m));
        } else {
            int k = c - nz;
            Mat m = Mat::Zero(dim, dim);
            for (int i = 0; i < nz; ++i) m += y(i) * rep->leg(i, rep->fh[i][k]);
            out += LinOp::ad(Series::constant(ring, m));
        }
    }
    return out;
}

OdeSystem ConnectionSpec::segment(const Vec& a, const Vec& b) const {
    OdeSystem ode;
    ode.dim = dim;
    ode.order = scale.ring_order();
    for (const auto& l : logs) {
        Cx la = form_value(l, a), lb = form_value(l, b);
        Cx dl = lb - la;
        if (std::abs(dl) < 1e-14) continue;  // constant along the segment
        ode.terms.push_back(OdeTerm::pole_op(-la / dl, l.op));
    }
    if (coupled) {
        int ring = scale.ring_order();
        // M(t) = sum_i z_i(t) mu(t)^{(i)} is quadratic in t; the term is ad(dM/dt)
        Vec ua = a.segment(nz, rank), du = (b - a).segment(nz, rank);
        Mat m1 = Mat::Zero(dim, dim), m2 = Mat::Zero(dim, dim);
        for (int i = 0; i < nz; ++i) {
            Mat ha = rep->leg(i, rep->cartan_action_factor_cx(i, ua));
            Mat hd = rep->leg(i, rep->cartan_action_factor_cx(i, du));
            m1 += (b(i) - a(i)) * ha + a(i) * hd;
            m2 += (b(i) - a(i)) * hd;
        }
        std::vector<LinOp> powers;
        powers.push_back(LinOp::ad(Series::constant(ring, m1)));
        powers.push_back(LinOp::ad(Series::constant(ring, Cx(2) * m2)));
        ode.terms.push_back(OdeTerm::poly_op(std::move(powers)));
    }
    return ode;
}

Series ConnectionSpec::transport_polyline(const std::vector<Vec>& pts, double tol) const {
    Series t = Series::identity(scale.ring_order(), dim);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        OdeSystem ode = segment(pts[k], pts[k + 1]);
        PathInC path;
        path.waypoints = {Cx(0), Cx(1)};
        path.clearance = 1e-9;
        t = transport_state(ode, path, t, tol);
    }
    return t;
}

ConnectionSpec build_connection(ConnKind kind, const Representation& rep, const Tensors& tensors, const Scale& scale) {
    ConnectionSpec conn;
    conn.kind = kind;
    conn.scale = scale;
    conn.rep = &rep;
    conn.dim = rep.dim;
    const auto& rs = *rep.rs;
    Subdiag full = (1u << rs.rank()) - 1;
    bool has_z = kind == ConnKind::KZ || kind == ConnKind::DynKZ;
    bool has_mu = kind != ConnKind::KZ;
    conn.nz = has_z ? rep.legs() : 0;
    conn.rank = has_mu ? rs.rank() : 0;
    conn.coupled = kind == ConnKind::DynKZ;
    if (has_z && rep.legs() < 2) throw Error("UnsupportedN", "configuration connections need at least two legs");

    if (has_z)
        for (int i = 0; i < rep.legs(); ++i)
            for (int j = i + 1; j < rep.legs(); ++j) {
                ConnectionSpec::Log l;
                l.grad = RVec::Zero(conn.nvars());
                l.grad(i) = 1;
                l.grad(j) = -1;
                l.op = LinOp::left(scale.nu_times(tensors.omega(i, j, full)));
                conn.logs.push_back(std::move(l));
            }
    if (has_mu)
        for (int r = 0; r < rs.num_positive(); ++r) {
            ConnectionSpec::Log l;
            l.grad = RVec::Zero(conn.nvars());
            for (int k = 0; k < rs.rank(); ++k) l.grad(conn.nz + k) = rs.cartan_pairing(r, k);
            Mat res;
            if (kind == ConnKind::CasimirK) res = tensors.k_alpha(r);
            else if (kind == ConnKind::CasimirC) res = tensors.c_alpha(r);
            else res = tensors.k_alpha(r);  // DynKZ carries the coproduct of K_alpha
            l.op = LinOp::left(scale.nu_times(0.5 * res));
            conn.logs.push_back(std::move(l));
        }
    return conn;
}

VerificationReport verify_flatness(const ConnectionSpec& conn, const Tensors& tensors, int samples, unsigned seed,
                                   double tol, double tol_identities) {
    VerificationReport rep;
    const Representation& v = *conn.rep;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.3, 1.7), U2(-0.5, 0.5);

    double worst = 0;
    int nv = conn.nvars();
    for (int s = 0; s < samples; ++s) {
        Vec y(nv);
        for (int i = 0; i < conn.nz; ++i) y(i) = Cx(2.0 * i + U(rng), U2(rng));
        for (int k = 0; k < conn.rank; ++k) y(conn.nz + k) = Cx(U(rng), U2(rng));
        // random coordinate 2-plane
        std::uniform_int_distribution<int> pick(0, nv - 1);
        int c1 = pick(rng), c2 = pick(rng);
        if (c1 == c2) c2 = (c2 + 1) % nv;
        LinOp a1 = conn.coefficient(c1, y), a2 = conn.coefficient(c2, y);
        Mat x = Mat::Random(v.dim, v.dim);
        Series xs = Series::constant(conn.scale.ring_order(), x / mat_norm(x));
        Series curv = a1.apply(a2.apply(xs)) - a2.apply(a1.apply(xs));
        worst = std::max(worst, curv.norm());
    }
    rep.add("flatness curvature", worst, tol, {{"samples", samples}});

    if (conn.kind == ConnKind::DynKZ) {
        const auto& rs = *v.rs;
        Subdiag full = (1u << rs.rank()) - 1;
        std::uniform_real_distribution<double> Uh(0.4, 1.3);
        RVec mu(rs.rank());
        for (int k = 0; k < rs.rank(); ++k) mu(k) = Uh(rng);
        double id1 = 0, id2 = 0, id3 = 0;
        for (int i = 0; i < v.legs(); ++i)
            for (int j = i + 1; j < v.legs(); ++j) {
                Mat om = tensors.omega(i, j, full);
                Mat mi = v.leg(i, v.cartan_action_factor(i, mu));
                Mat mj = v.leg(j, v.cartan_action_factor(j, mu));
                id1 = std::max(id1, mat_norm(commutator(om, mi + mj)));
                for (int k = 0; k < v.legs(); ++k)
                    if (k != i && k != j) id1 = std::max(id1, mat_norm(commutator(om, v.leg(k, v.cartan_action_factor(k, mu)))));
                // weight structure of the off-Cartan part against the coupling
                Mat sum_pm = Mat::Zero(v.dim, v.dim);
                for (int r = 0; r < rs.num_positive(); ++r) {
                    Mat pa = v.leg(i, tensors.rv().fxp[i][r]) * v.leg(j, tensors.rv().fxm[j][r]);
                    Mat ma = v.leg(i, tensors.rv().fxm[i][r]) * v.leg(j, tensors.rv().fxp[j][r]);
                    double amu = rs.pairing(r, mu);
                    id2 = std::max(id2, mat_norm(commutator(pa + ma, mi) + amu * (pa - ma)));
                    sum_pm += pa + ma;
                }
                Mat omh = tensors.omega_h(i, j, full);
                id3 = std::max(id3, mat_norm(om - omh - sum_pm));
                id3 = std::max(id3, mat_norm(commutator(omh, mi)));
            }
        rep.add("coupling vs configuration term", id1, tol_identities);
        rep.add("coupling vs cartan term", id2, tol_identities);
        rep.add("mixed-term cancellation", id3, tol_identities);
    }
    return rep;
}

Series kz_associator(const Representation& v1, const Representation& v2, const Representation& v3, const Scale& scale,
                     double x_probe, int terms, Subdiag block) {
    Representation triple = tensor({v1, v2, v3});
    Tensors t(triple);
    Subdiag full = block ? block : (1u << triple.rs->rank()) - 1;
    int l1 = v1.legs(), l2 = v2.legs(), l3 = v3.legs();
    Mat om12 = Mat::Zero(triple.dim, triple.dim), om23 = om12;
    for (int i = 0; i < l1; ++i)
        for (int j = l1; j < l1 + l2; ++j) om12 += t.omega(i, j, full);
    for (int i = l1; i < l1 + l2; ++i)
        for (int j = l1 + l2; j < l1 + l2 + l3; ++j) om23 += t.omega(i, j, full);

    int N = scale.ring_order();
    Series nu12 = scale.nu_times(om12), nu23 = scale.nu_times(om23);

    OdeSystem reg0;
    reg0.dim = triple.dim;
    reg0.order = N;
    reg0.terms.push_back(OdeTerm::pole_op(1, LinOp::left(nu23)));
    FrobeniusSolution h0(reg0, 0, nu12, Series::identity(N, triple.dim), terms);

    OdeSystem reg1;
    reg1.dim = triple.dim;
    reg1.order = N;
    reg1.terms.push_back(OdeTerm::pole_op(0, LinOp::left(nu12)));
    FrobeniusSolution h1(reg1, 1, nu23, Series::identity(N, triple.dim), terms);

    Cx x(x_probe, 0);
    Series g0 = h0.eval(x) * scale.nu_power(om12, std::log(x_probe));
    Series g1 = h1.eval(x) * scale.nu_power(om23, std::log(1 - x_probe));
    return g1.inverse() * g0;
}

Mat slot_permutation(const std::vector<int>& dims, const std::vector<int>& dest) {
    int n = int(dims.size());
    int total = 1;
    for (int d : dims) total *= d;
    std::vector<int> out_dims(n);
    for (int k = 0; k < n; ++k) out_dims[dest[k]] = dims[k];
    Mat p = Mat::Zero(total, total);
    std::vector<int> idx(n, 0);
    for (int flat = 0; flat < total; ++flat) {
        // flat indexes the source basis vector (row-major over dims)
        int rem = flat;
        for (int k = n - 1; k >= 0; --k) { idx[k] = rem % dims[k]; rem /= dims[k]; }
        int out = 0;
        for (int slot = 0; slot < n; ++slot) {
            int src = -1;
            for (int k = 0; k < n; ++k)
                if (dest[k] == slot) src = k;
            out = out * out_dims[slot] + idx[src];
        }
        p(out, flat) = 1;
    }
    return p;
}

Mat DcpContext::residue(int r) const { return variant_c ? tensors->c_alpha(r) : tensors->k_alpha(r); }

Mat DcpContext::residue_sub(Subdiag b) const {
    Mat out = Mat::Zero(rep->dim, rep->dim);
    for (int r : rs->positive_roots_of(b)) out += residue(r);
    return out;
}

DcpContext make_dcp(const Representation& rep, const Tensors& tensors, Scale scale, bool variant_c) {
    DcpContext ctx;
    ctx.rs = rep.rs;
    ctx.diagram = Diagram::from_root_system(*rep.rs);
    ctx.fam = enumerate_nested_sets(ctx.diagram);
    ctx.adapted = AdaptedFamily::standard(*rep.rs, ctx.diagram);
    verify_adapted(*rep.rs, ctx.diagram, ctx.fam, ctx.adapted);
    ctx.rep = &rep;
    ctx.tensors = &tensors;
    ctx.scale = scale;
    ctx.variant_c = variant_c;
    for (const auto& m : ctx.fam.mns) ctx.charts.emplace_back(*rep.rs, ctx.diagram, m, ctx.adapted);
    return ctx;
}

namespace {

// polynomial coefficients of alpha along u(t) = t * u0 * ones in the chart
std::vector<Cx> diag_root_poly(const BlowupChart& chart, const BlowupChart::RootPull& rp, double u0, int rank) {
    std::vector<Cx> coeff(rank + 1, Cx(0));
    for (auto& [a, b] : rp.terms) {
        int depth = 0;
        for (int c = 0; c < rank; ++c)
            if (subdiag_contains(chart.mns().elements[c], b)) ++depth;
        coeff[depth] += a * std::pow(u0, depth);
    }
    return coeff;
}

std::vector<Cx> poly_roots(std::vector<Cx> c) {
    // strip leading/trailing zero coefficients; companion matrix eigenvalues
    while (!c.empty() && std::abs(c.back()) < 1e-13) c.pop_back();
    int low = 0;
    while (low < int(c.size()) && std::abs(c[low]) < 1e-13) ++low;
    std::vector<Cx> out;
    int deg = int(c.size()) - 1 - low;
    if (deg <= 0) return out;
    Mat comp = Mat::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) {
        comp(i, deg - 1) = -c[low + i] / c.back();
        if (i + 1 < deg) comp(i + 1, i) = 1;
    }
    Eigen::ComplexEigenSolver<Mat> es(comp);
    for (int i = 0; i < deg; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

}  // namespace

FundamentalSolution::FundamentalSolution(const DcpContext& ctx, int mns_index, double tol, double u0, int fro_terms)
    : ctx_(&ctx), mns_(mns_index), u0_(u0) {
    const auto& chart = ctx.charts[mns_index];
    int rank = chart.rank();
    int N = ctx.scale.ring_order();
    int d = ctx.rep->dim;

    // nudge the base coordinate so the reduced root polynomials have no zeros
    // near the diagonal ray (0, 1]; their roots move outward as u0 shrinks
    for (int tries = 0; tries < 20; ++tries) {
        bool ok = true;
        for (const auto& rp : chart.root_pulls()) {
            auto poly = diag_root_poly(chart, rp, u0_, rank);
            Cx val = 0;
            double scale = 0;
            for (int k = int(poly.size()) - 1; k >= 0; --k) {
                val = val + poly[k];
                scale += std::abs(poly[k]);
            }
            if (std::abs(val) < 0.03 * scale) ok = false;  // base accidentally near the divisor
            for (Cx tau : poly_roots(poly))
                if (std::abs(tau) > 1e-10 && std::abs(tau) < 1.35) ok = false;
        }
        if (ok) break;
        if (tries == 19) throw Error("ChartSingular", "no base point clear of the chart's singular divisors");
        u0_ *= 0.85;
    }

    Vec u = Vec::Constant(rank, Cx(u0_));
    base_ = chart.u_to_point(u);

    // the diagonal-segment equation: residue (nu/2) sum_B Res_B at t = 0 plus
    // simple poles at the roots of the reduced polynomials q_alpha
    Mat ml_mat = Mat::Zero(d, d);
    for (Subdiag b : chart.mns().elements) ml_mat += ctx.residue_sub(b);
    Series ml = ctx.scale.nu_times(0.5 * ml_mat);

    OdeSystem regular;
    regular.dim = d;
    regular.order = N;
    double min_root = 1e9;
    for (const auto& rp : chart.root_pulls()) {
        auto poly = diag_root_poly(chart, rp, u0_, rank);
        for (Cx tau : poly_roots(poly)) {
            if (std::abs(tau) < 1e-10) continue;  // the corner root carried by ML
            regular.terms.push_back(OdeTerm::pole_op(tau, LinOp::left(ctx.scale.nu_times(0.5 * ctx.residue(rp.root)))));
            min_root = std::min(min_root, std::abs(tau));
        }
    }
    diag_ode_ = regular;
    diag_ode_.terms.push_back(OdeTerm::pole_op(0, LinOp::left(ml)));

    FrobeniusSolution h(regular, 0, ml, Series::identity(N, d), fro_terms);
    double t_eval = std::min(1.0, 0.4 * min_root);
    Series val = h.eval(t_eval);
    if (h.tail_estimate(t_eval) > 1e-12) val = h.eval(t_eval *= 0.7);
    Series powers = normalization(t_eval);
    if (t_eval < 1.0) {
        PathInC path;
        path.waypoints = {Cx(t_eval), Cx(1)};
        path.clearance = 1e-9;
        value_ = transport_state(diag_ode_, path, val * powers, tol);
    } else {
        value_ = val * powers;
    }
}

Series FundamentalSolution::normalization(double t) const {
    const auto& chart = ctx_->charts[mns_];
    Series out = Series::identity(ctx_->scale.ring_order(), ctx_->rep->dim);
    for (Subdiag b : chart.mns().elements)
        out = out * ctx_->scale.nu_power(0.5 * ctx_->residue_sub(b), std::log(t * u0_));
    return out;
}

Series FundamentalSolution::at(const Vec& y, double tol) const {
    if ((y - base_).cwiseAbs().maxCoeff() < 1e-14) return value_;
    // Casimir segment in h-coordinates: poles where alpha(y(t)) vanishes
    OdeSystem ode;
    ode.dim = ctx_->rep->dim;
    ode.order = ctx_->scale.ring_order();
    const auto& rs = *ctx_->rs;
    for (int r = 0; r < rs.num_positive(); ++r) {
        Cx la = 0, lb = 0;
        for (int j = 0; j < rs.rank(); ++j)
            for (int k = 0; k < rs.rank(); ++k) {
                la += double(rs.pos_root(r)(j) * rs.cartan()(k, j)) * base_(k);
                lb += double(rs.pos_root(r)(j) * rs.cartan()(k, j)) * y(k);
            }
        Cx dl = lb - la;
        if (std::abs(dl) < 1e-14) continue;
        ode.terms.push_back(OdeTerm::pole_op(-la / dl, LinOp::left(ctx_->scale.nu_times(0.5 * ctx_->residue(r)))));
    }
    PathInC path;
    path.waypoints = {Cx(0), Cx(1)};
    path.clearance = 1e-9;
    return transport_state(ode, path, value_, tol);
}

Series FundamentalSolution::corner_limit(double s, double tol, double* err) const {
    auto value_from = [&](double start) {
        PathInC path;
        path.waypoints = {Cx(start), Cx(1)};
        path.clearance = 1e-12;
        return transport_state(diag_ode_, path, normalization(start), tol);
    };
    Series v1 = value_from(s), v2 = value_from(0.5 * s);
    Series extrap = Cx(2) * v2 - v1;
    if (err) *err = (v2 - v1).norm();
    return extrap;
}

Series dcp_associator(const DcpContext& ctx, const FundamentalSolution& g, const FundamentalSolution& f, double tol) {
    (void)ctx;
    Series psi_g = g.at(f.base_point(), tol);
    return psi_g.inverse() * f.at_base();
}

BraidMonodromy::BraidMonodromy(const DcpContext& ctx, int mns_index, double tol)
    : ctx_(&ctx), sol_(ctx, mns_index, tol), tol_(tol) {}

Series BraidMonodromy::generator(int vertex, int sign) const {
    auto it = cache_.find(sign * (vertex + 1));
    if (it != cache_.end()) return it->second;
    const auto& rs = *ctx_->rs;
    const Representation& rep = *ctx_->rep;
    Vec y0 = sol_.base_point();
    // split y0 = (c/2) coroot_i + w along the alpha_i coordinate
    int ridx = -1;
    for (int r = 0; r < rs.num_positive(); ++r)
        if (rs.pos_root(r).sum() == 1 && rs.pos_root(r)(vertex) == 1) ridx = r;
    Cx c = 0;
    for (int k = 0; k < rs.rank(); ++k) c += double(rs.cartan_pairing(ridx, k)) * y0(k);

    Vec coroot = Vec::Zero(rs.rank());
    coroot(vertex) = 1;
    Vec w = y0 - (c / 2.0) * coroot;

    double cs = 0.3 * std::abs(c);
    std::vector<Vec> pts;
    auto tau_point = [&](Cx tau) { return Vec(w + (tau / 2.0) * coroot); };
    pts.push_back(y0);
    pts.push_back(tau_point(Cx(cs)));
    int chords = 8;
    for (int k = 1; k <= chords; ++k) {
        double th = sign > 0 ? kPi * k / chords : -kPi * k / chords;
        pts.push_back(tau_point(cs * Cx(std::cos(th), std::sin(th))));
    }
    pts.push_back(tau_point(-c));

    ConnectionSpec conn = build_connection(ctx_->variant_c ? ConnKind::CasimirC : ConnKind::CasimirK, rep, *ctx_->tensors,
                                           ctx_->scale);
    Series t;
    try {
        t = conn.transport_polyline(pts, tol_);
    } catch (const Error& e) {
        if (e.code == "PoleTooClose") throw Error("PathHitsWall", "generator path meets a reflection hyperplane");
        throw;
    }
    Mat stilde = rep.tits_reflection(vertex);
    if (sign < 0) stilde = stilde.partialPivLu().solve(Mat::Identity(rep.dim, rep.dim)).eval();
    Series result = sol_.at_base().inverse() * Series::constant(ctx_->scale.ring_order(), stilde) * t * sol_.at_base();
    cache_[sign * (vertex + 1)] = result;
    return result;
}

Series BraidMonodromy::word(const BraidWord& w) const {
    Series out = Series::identity(ctx_->scale.ring_order(), ctx_->rep->dim);
    for (int letter : w.letters) {
        int v = std::abs(letter) - 1;
        out = out * generator(v, letter > 0 ? +1 : -1);
    }
    return out;
}

}  // namespace casmon
