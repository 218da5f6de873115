#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casmon/fusion.hpp"
#include "casmon/qgroup.hpp"

#include <iostream>

using namespace casmon;

namespace {
Scale formal_scale(int order) {
    Scale s;
    s.formal = true;
    s.order = order;
    return s;
}

struct Sl2Pair {
    Representation v1, vv;
    std::unique_ptr<Tensors> t;
    FusionContext fc;
};

Sl2Pair make_sl2_pair(int order, Cx mu_val = Cx(0, 1.1)) {
    Sl2Pair p;
    p.v1 = sl2_irrep(1);
    p.vv = tensor({p.v1, p.v1});
    p.t = std::make_unique<Tensors>(p.vv);
    Vec mu(1);
    mu << mu_val;
    p.fc = FusionContext{&p.vv, p.t.get(), formal_scale(order), 0, mu};
    return p;
}
}  // namespace

TEST_CASE("zeta-form fusion solution: order 0 is 1, leading asymptotics, ODE residual") {
    auto p = make_sl2_pair(3);
    Vec zcfg(2);
    zcfg << Cx(0, 0.5), Cx(0, -0.5);

    Mat w = Mat::Zero(4, 4);
    for (int k = 0; k < 2; ++k) w += zcfg(k) * p.fc.mu_leg(k);

    OdeSystem ode;
    ode.dim = 4;
    ode.order = 3;
    ode.terms.push_back(OdeTerm::const_op(LinOp::ad(Series::constant(3, w))));
    LinOp src = LinOp::left(p.fc.scale.nu_times(p.t->omega(0, 1, 1u)));
    src += LinOp::right(Cx(-1) * p.fc.scale.nu_times(p.t->omega_h(0, 1, 1u)));
    ode.terms.push_back(OdeTerm::pole_op(0, src));

    AnchoredSolution sol(ode, w, Cx(0, 1), AnchorParams{30.0, 14, 1e-12});
    CHECK(mat_norm(sol.expansion()[0][0] - Mat::Identity(4, 4)) < 1e-14);
    CHECK(mat_norm(sol.expansion()[0][1]) < 1e-14);

    // leading 1/zeta coefficient at order hbar: -sum Omega^alpha / (alpha(mu)(z_i - z_j)) / (pi i)
    RootVectors rv = root_vectors(p.vv);
    Mat xp1 = p.vv.leg(0, rv.fxp[0][0]), xm2 = p.vv.leg(1, rv.fxm[1][0]);
    Mat xm1 = p.vv.leg(0, rv.fxm[0][0]), xp2 = p.vv.leg(1, rv.fxp[1][0]);
    Cx amu = 2.0 * p.fc.mu(0);  // alpha(mu), (alpha, alpha) = 2
    Cx dz = zcfg(0) - zcfg(1);
    Mat expect = -(xp1 * xm2 / (amu * dz) + xm1 * xp2 / (-amu * dz)) / (kPi * kI);
    CHECK(mat_norm(sol.expansion()[1][1] - expect) < 1e-12);

    // self-residual of the zeta ODE at sample points
    auto eval = [&](Cx z) { return sol.eval(z); };
    for (Cx z : {Cx(0, 3.0), Cx(0.8, 2.5), Cx(-0.6, 4.0)}) CHECK(ode_residual(ode, eval, z) < 1e-9);

    // two anchors agree
    AnchoredSolution sol2(ode, w, Cx(0, 1), AnchorParams{45.0, 14, 1e-12});
    CHECK((sol.eval(Cx(0, 2.5)) - sol2.eval(Cx(0, 2.5))).norm() < 1e-9);
}

TEST_CASE("trivial factor gives H = 1 identically") {
    auto v0 = sl2_irrep(0);
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v0, v1});
    Tensors t(vv);
    Vec mu(1);
    mu << Cx(0, 1.0);
    FusionContext fc{&vv, &t, formal_scale(3), 0, mu};
    Vec zcfg(2);
    zcfg << Cx(0, 0.7), Cx(0, -0.4);
    Series h = fusion_h(fc, zcfg, Cx(0, 2), Cx(0, 1));
    CHECK((h - Series::identity(3, 2)).norm() < 1e-11);
}

TEST_CASE("scale covariance and reflection symmetry of the fusion solution") {
    auto p = make_sl2_pair(3);
    Vec zcfg(2);
    zcfg << Cx(0, 0.8), Cx(0, -0.3);
    Cx zeta(0.4, 2.2);
    double tfac = 2.0;
    Series lhs = fusion_h(p.fc, zcfg, tfac * zeta, Cx(0, 1));
    Series rhs = fusion_h(p.fc, Vec(tfac * zcfg), zeta, Cx(0, 1));
    CHECK((lhs - rhs).norm() < 1e-8);

    // sigma(H) = Theta^{x2}(H): flipping the legs matches the solution in the
    // Chevalley-twisted module with the configuration reversed and mu negated
    // (the reflection acts on the arguments as well as the tensor slots)
    Series h = fusion_h(p.fc, zcfg, zeta, Cx(0, 1));
    Mat perm = slot_permutation({2, 2}, {1, 0});
    Series flipped = h.conj_by(perm, perm.transpose());
    Vec zrev(2);
    zrev << zcfg(1), zcfg(0);
    auto tw = p.vv.chevalley_twist();
    Tensors ttw(tw);
    FusionContext fctw{&tw, &ttw, p.fc.scale, 0, Vec(-p.fc.mu)};
    Series htw = fusion_h(fctw, zrev, zeta, Cx(0, 1));
    CHECK((flipped - htw).norm() < 1e-8);
}

TEST_CASE("three-point solution converges to the two-point one in the recursive limits") {
    auto v1 = sl2_irrep(1);
    auto vvv = tensor({v1, v1, v1});
    Tensors t3(vvv);
    Vec mu(1);
    mu << Cx(0, 1.1);
    Scale sc = formal_scale(3);
    FusionContext fc3{&vvv, &t3, sc, 0, mu};
    auto p2 = make_sl2_pair(3);

    Cx zeta(0, 2.0);
    Vec pair_cfg(2);
    pair_cfg << Cx(0, 0.4), Cx(0, -0.6);
    Series h2 = fusion_h(p2.fc, pair_cfg, zeta, Cx(0, 1));
    Series expect(3, 8);
    for (int k = 0; k <= 3; ++k) expect[k] = kron(Mat::Identity(2, 2), h2[k]);

    double prev = 1e9;
    std::vector<double> errs;
    for (double big : {8.0, 16.0, 32.0}) {
        Vec cfg(3);
        cfg << Cx(0, big), pair_cfg(0), pair_cfg(1);
        Series h3 = fusion_h(fc3, cfg, zeta, Cx(0, 1));
        errs.push_back((h3 - expect).norm());
        CHECK(errs.back() < prev);
        prev = errs.back();
    }
    // Richardson in 1/zeta1: extrapolated limit is much closer
    double extrap = errs[2] - (errs[1] - errs[2]);
    CHECK(std::abs(extrap) < 5e-4);
    CHECK(errs[2] < 5e-3);

    // the other limit: zeta_3 -> -i infinity gives H^{(2)} x 1
    Series expect2(3, 8);
    for (int k = 0; k <= 3; ++k) expect2[k] = kron(h2[k], Mat::Identity(2, 2));
    Vec cfg(3);
    cfg << pair_cfg(0), pair_cfg(1), Cx(0, -32.0);
    Series h3 = fusion_h(fc3, cfg, zeta, Cx(0, 1));
    CHECK((h3 - expect2).norm() < 5e-3);
}

TEST_CASE("z-form two-leg solution matches the zeta-form through scale covariance") {
    auto p = make_sl2_pair(3);
    // J-solution H(z) with W = mu^{(1)}: compare with H(zeta; zeta_cfg) at
    // zeta_cfg = (z, 0) by covariance in the definition
    Cx z(1.7, 0);
    JSolution j = fusion_j2(p.fc, z, +1);
    Vec cfg(2);
    cfg << Cx(1, 0), Cx(0, 0);
    Series h = fusion_h(p.fc, cfg, z, Cx(1, 0));
    CHECK((j.h - h).norm() < 1e-9);
}

TEST_CASE("upsilon0: mu = 0 gives H = 1; trivial first factor gives 1; ODE holds") {
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v1, v1});
    Tensors t(vv);
    Scale sc = formal_scale(3);
    Vec mu0(1);
    mu0 << Cx(0, 0);
    FusionContext fc0{&vv, &t, sc, 0, mu0};
    CHECK((upsilon0_h(fc0, Cx(0.8, 0.1)) - Series::identity(3, 4)).norm() < 1e-12);

    auto v0 = sl2_irrep(0);
    auto tv = tensor({v0, v1});
    Tensors tt(tv);
    Vec mu(1);
    mu << Cx(0, 1.1);
    FusionContext fct{&tv, &tt, sc, 0, mu};
    CHECK((upsilon0_h(fct, Cx(0.9, 0)) - Series::identity(3, 2)).norm() < 1e-12);

    // residual of the Upsilon equation d/dz Y = (nu Om / z + ad mu1) Y
    auto p = make_sl2_pair(3);
    Mat om = p.t->omega(0, 1, 1u);
    Mat mu1 = p.fc.mu_leg(0);
    OdeSystem ode;
    ode.dim = 4;
    ode.order = 3;
    ode.terms.push_back(OdeTerm::pole_op(0, LinOp::left(p.fc.scale.nu_times(om))));
    ode.terms.push_back(OdeTerm::const_op(LinOp::ad(Series::constant(3, mu1))));
    auto upsilon = [&](Cx z) {
        Series h = upsilon0_h(p.fc, z);
        Cx logz = std::log(z);
        return Series::constant(3, expm(z * mu1)) * h * p.fc.scale.nu_power(om, logz) *
               Series::constant(3, expm(-z * mu1));
    };
    CHECK(ode_residual(ode, upsilon, Cx(0.7, 0.15)) < 1e-8);
}

TEST_CASE("differential twist: z-independence, counit slots, normalization, first-order data") {
    auto p = make_sl2_pair(3);
    TwistResult tw = differential_twist(p.fc, +1);
    CHECK(tw.z_independence < 1e-8);
    CHECK(mat_norm(tw.value[0] - Mat::Identity(4, 4)) < 1e-10);

    // counit slots: a trivial factor in either slot gives the identity twist
    auto v0 = sl2_irrep(0);
    auto v1 = sl2_irrep(1);
    for (int slot = 0; slot < 2; ++slot) {
        std::vector<Representation> factors{v1, v1};
        factors[slot] = v0;
        auto w = tensor({factors[0], factors[1]});
        Tensors twt(w);
        FusionContext fcw{&w, &twt, p.fc.scale, 0, p.fc.mu};
        TwistResult t0 = differential_twist(fcw, +1);
        CHECK((t0.value - Series::identity(3, 2)).norm() < 1e-9);
    }

    // frozen first-order identity: Alt2 F = hbar (r - r^{21}) exactly
    RootVectors rv = root_vectors(p.vv);
    Mat r_mat = p.vv.leg(0, rv.fxp[0][0]) * p.vv.leg(1, rv.fxm[1][0]);  // e x f
    Mat f1 = tw.value[1];
    Mat flip = slot_permutation({2, 2}, {1, 0});
    Mat alt = f1 - flip * f1 * flip;
    Mat r_alt = r_mat - flip * r_mat * flip;
    CHECK(mat_norm(alt - r_alt) < 1e-8);

    // the first-order part is Hochschild closed:
    // 1 x f - (Delta x id) f + (id x Delta) f - f x 1 = 0
    auto grouped_f1 = [&](bool left_group) {
        auto grouped = left_group ? tensor({as_single_leg(p.vv), p.v1}) : tensor({p.v1, as_single_leg(p.vv)});
        Tensors tg(grouped);
        FusionContext fg{&grouped, &tg, p.fc.scale, 0, p.fc.mu};
        return differential_twist(fg, +1).value[1];
    };
    Mat one_f = kron(Mat::Identity(2, 2), f1), f_one = kron(f1, Mat::Identity(2, 2));
    Mat hoch = one_f - grouped_f1(true) + grouped_f1(false) - f_one;
    CHECK(mat_norm(hoch) < 1e-8);
}

TEST_CASE("twist kills the KZ associator on sl2") {
    auto v1 = sl2_irrep(1);
    Scale sc = formal_scale(3);
    Vec mu(1);
    mu << Cx(0, 1.1);

    auto ctx_of = [&](const Representation& a, const Representation& b) {
        auto pair = tensor({a, b});
        return pair;
    };
    (void)ctx_of;

    // F on (V,V), (V x V, V), (V, V x V) at the same mu
    auto vv = tensor({v1, v1});
    Tensors tvv(vv);
    FusionContext fvv{&vv, &tvv, sc, 0, mu};
    Series f = differential_twist(fvv, +1).value;

    auto v12_3 = tensor({as_single_leg(vv), v1});
    Tensors t123(v12_3);
    FusionContext f123{&v12_3, &t123, sc, 0, mu};
    Series f_12_3 = differential_twist(f123, +1).value;

    auto v1_23 = tensor({v1, as_single_leg(vv)});
    Tensors t1_23(v1_23);
    FusionContext f1_23{&v1_23, &t1_23, sc, 0, mu};
    Series f_1_23 = differential_twist(f1_23, +1).value;

    Series phi = kz_associator(v1, v1, v1, sc);
    Series f_x_1(sc.order, 8), one_x_f(sc.order, 8);
    for (int k = 0; k <= sc.order; ++k) {
        f_x_1[k] = kron(f[k], Mat::Identity(2, 2));
        one_x_f[k] = kron(Mat::Identity(2, 2), f[k]);
    }
    Series lhs = phi * f_12_3 * f_x_1;
    Series rhs = f_1_23 * one_x_f;
    std::cout << "[kills-phi] residual = " << (lhs - rhs).norm() << "\n";
    CHECK((lhs - rhs).norm() < 1e-7);
}

TEST_CASE("Casimir-type PDE for the twist by finite differences in mu") {
    Scale sc = formal_scale(3);
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v1, v1});
    Tensors t(vv);
    auto twist_at = [&](Cx muval) {
        Vec mu(1);
        mu << muval;
        FusionContext fc{&vv, &t, sc, 0, mu};
        return differential_twist(fc, +1).value;
    };
    Cx mu0(0, 1.1);
    double eps = 1e-4;
    Series fp = twist_at(mu0 + eps), fm = twist_at(mu0 - eps);
    Series fp2 = twist_at(mu0 + 2 * eps), fm2 = twist_at(mu0 - 2 * eps);
    Series deriv = Cx(1.0 / (12 * eps)) * (Cx(-1) * fp2 + Cx(8) * fp - Cx(8) * fm + fm2);
    Series f = twist_at(mu0);
    // dF = (nu/2)(d alpha/alpha)(Delta(K) F - F (K^(1)+K^(2))), d alpha(d/dmu)/alpha(mu) = 1/mu
    Mat dk = t.k_alpha(0);
    Mat legs = t.k_alpha_leg(0, 0) + t.k_alpha_leg(1, 0);
    Series rhs = Cx(1.0 / mu0) * (Cx(0.5) * (sc.nu_times(dk) * f - f * sc.nu_times(legs)));
    CHECK((deriv - rhs).norm() < 1e-6);
}

TEST_CASE("static asymptotic solution factorizes the A2 DCP solution") {
    auto sl3 = sln_defining(3);
    Tensors t(sl3);
    Scale sc = formal_scale(3);
    auto ctx = make_dcp(sl3, t, sc, false);
    for (int mns = 0; mns < 2; ++mns) {
        FundamentalSolution psi(ctx, mns, 1e-12);
        int i = ctx.fam.mns[mns].marked.at(3u);  // marked vertex of D
        int j = 1 - i;
        // evaluate where |alpha_i| clears the disk of singular directions
        Vec y0 = psi.base_point() + Cx(2.0) * sl3.rs->fundamental_coweight(i).cast<Cx>();
        Series psi_val = psi.at(y0, 1e-12);

        FusionContext fc1{&sl3, &t, sc, 0, y0};
        LeviData lv = levi_split(fc1, i, y0);
        Cx w = 0;
        for (int k = 0; k < 2; ++k) w += double(sl3.rs->cartan()(k, i)) * y0(k);
        UpsilonInf ups = upsilon_inf(fc1, lv, w, std::log(w));

        // rank-one DCP solution of the bar system: alpha_j^{(nu/2) K_{alpha_j}}
        Cx aj = 0;
        for (int k = 0; k < 2; ++k) aj += double(sl3.rs->cartan()(k, j)) * y0(k);
        int rj = -1;
        for (int r = 0; r < 3; ++r)
            if (sl3.rs->pos_root(r).sum() == 1 && sl3.rs->pos_root(r)(j) == 1) rj = r;
        Series psi_bar = sc.nu_power(0.5 * t.k_alpha(rj), std::log(aj));

        // x_D(coweight_i) = 2 for the standard family on A2
        Mat kdiff = t.k_sub(3u) - t.k_sub(1u << j);
        Series corner = sc.nu_power(0.5 * kdiff, std::log(2.0));

        Series rhs = ups.value * psi_bar * corner;
        CHECK((psi_val - rhs).norm() < 1e-7);
    }
}

TEST_CASE("dynamical asymptotic solution tends to the static tensor square") {
    auto sl3 = sln_defining(3);
    auto pair = tensor({sl3, sl3});
    Tensors t1(sl3), t2(pair);
    Scale sc = formal_scale(2);
    Vec mu(2);
    mu << Cx(0, 2.0), Cx(0, 0.6);
    FusionContext fc2{&pair, &t2, sc, 0, mu};
    FusionContext fc1{&sl3, &t1, sc, 0, mu};
    int vertex = 0;
    LeviData lv2 = levi_split(fc2, vertex, mu);
    LeviData lv1 = levi_split(fc1, vertex, mu);

    Cx w(0, 3.0);
    Cx logw = std::log(w);
    UpsilonInf u1 = upsilon_inf(fc1, lv1, w, logw);
    Series expect(sc.order, pair.dim);
    {
        Series l0(sc.order, pair.dim), l1(sc.order, pair.dim);
        for (int k = 0; k <= sc.order; ++k) {
            l0[k] = kron(u1.value[k], Mat::Identity(3, 3));
            l1[k] = kron(Mat::Identity(3, 3), u1.value[k]);
        }
        expect = l0 * l1;
    }
    Mat legsum = Mat::Zero(9, 9);
    for (int r : sl3.rs->positive_roots_of(3u)) {
        if (sl3.rs->root_in(r, lv2.bar)) continue;
        legsum += t2.k_alpha_leg(0, r) + t2.k_alpha_leg(1, r);
    }
    double prev = 1e9;
    for (double z : {20.0, 40.0, 80.0}) {
        Series h = upsilon_inf_dyn_h(fc2, lv2, z, w, +1, AnchorParams{30.0, 14, 1e-12});
        Series val = h * sc.nu_power(0.5 * legsum, logw);
        double err = (val - expect).norm();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("rank-one centraliser constant: routes agree and the relative twist kills Phi") {
    Scale sc = formal_scale(3);
    auto v1 = sl2_irrep(1);
    Vec mu(1);
    mu << Cx(0, 1.3);
    auto res = centraliser_constant(v1, v1, sc, 0, mu, 0, +1);
    INFO("route disagreement ", res.route_disagreement);
    CHECK(res.route_disagreement < 1e-7);

    // F' on the grouped modules for the twisted-associator check
    auto vv = tensor({v1, v1});
    auto res_12_3 = centraliser_constant(as_single_leg(vv), v1, sc, 0, mu, 0, +1);
    auto res_1_23 = centraliser_constant(v1, as_single_leg(vv), sc, 0, mu, 0, +1);

    Series fp = res.relative_twist;
    Series phi = kz_associator(v1, v1, v1, sc);
    Series fp_x_1(sc.order, 8), one_x_fp(sc.order, 8);
    for (int k = 0; k <= sc.order; ++k) {
        fp_x_1[k] = kron(fp[k], Mat::Identity(2, 2));
        one_x_fp[k] = kron(Mat::Identity(2, 2), fp[k]);
    }
    Series twisted = twist_action(phi, one_x_fp, res_12_3.relative_twist, res_1_23.relative_twist, fp_x_1);
    INFO("(Phi)_{F'} - 1 = ", (twisted - Series::identity(sc.order, 8)).norm());
    CHECK((twisted - Series::identity(sc.order, 8)).norm() < 1e-7);

    // both pm variants exist; report their ratio rather than asserting a relation
    auto resm = centraliser_constant(v1, v1, sc, 0, mu, 0, -1, AnchorParams{}, false);
    Series ratio = res.c_route_a * resm.c_route_a.inverse();
    CHECK(ratio.norm() < 100);  // finite, recorded
    CHECK((ratio - Series::identity(sc.order, 4)).norm() > 1e-4);  // the pair genuinely differs
}

TEST_CASE("A2 centraliser constant: routes agree, Levi invariance, constancy") {
    Scale sc = formal_scale(2);
    auto sl3 = sln_defining(3);
    Vec mu(2);
    mu << Cx(0, 1.3), Cx(0, 1.0);
    auto res = centraliser_constant(sl3, sl3, sc, 0, mu, 0, +1);
    INFO("route disagreement ", res.route_disagreement);
    CHECK(res.route_disagreement < 1e-6);

    auto pair = tensor({sl3, sl3});
    for (const Mat& gen : {pair.e[1], pair.f[1], pair.h[1]}) {
        double r = 0;
        for (int k = 0; k <= sc.order; ++k) r = std::max(r, mat_norm(commutator(gen, res.relative_twist[k])));
        CHECK(r < 1e-7);
    }

    // constancy in mu
    Vec mu2(2);
    mu2 << Cx(0, 1.05), Cx(0, 0.85);
    auto res2 = centraliser_constant(sl3, sl3, sc, 0, mu2, 0, +1);
    CHECK((res.relative_twist - res2.relative_twist).norm() < 1e-6);

    // welding first-order data: Alt2 of the dressed twist is r_D - r_bar
    Tensors t2(pair);
    Vec mu_dummy = mu;
    FusionContext fc2{&pair, &t2, sc, 0, mu_dummy};
    Series dressed = dress_relative_twist(fc2, 0, 2.0, res.relative_twist);
    Mat flip = slot_permutation({3, 3}, {1, 0});
    Mat alt = dressed[1] - flip * dressed[1] * flip;
    Mat rd = t2.r_matrix_classical(0, 1, 3u), rbar = t2.r_matrix_classical(0, 1, 2u);
    Mat expect_r = rd - rbar;
    Mat expect = expect_r - flip * expect_r * flip;
    INFO("|Alt2 dressed - (r_D - r_bar alt)| = ", mat_norm(alt - expect), " |+| = ", mat_norm(alt + expect));
    CHECK(std::min(mat_norm(alt - expect), mat_norm(alt + expect)) < 1e-7);
}

TEST_CASE("bracketing solutions: ratio is the KZ associator; regularized limits of J3") {
    Scale sc = formal_scale(3);
    auto v1 = sl2_irrep(1);
    auto vvv = tensor({v1, v1, v1});
    Tensors t3(vvv);
    Vec mu(1);
    mu << Cx(0, 1.1);
    FusionContext fc3{&vvv, &t3, sc, 0, mu};

    // common configuration z = (0.5, 0.1, -0.6)
    Vec z(3);
    z << Cx(0.5), Cx(0.1), Cx(-0.6);
    Cx zout = z(0) - z(2);
    Vec u0(2), u1(2);
    u0 << (z(0) - z(1)) / zout, zout;
    u1 << (z(1) - z(2)) / zout, zout;
    BracketSolution b0 = bracketing_upsilon(fc3, 0, u0, 1e-12);
    BracketSolution b1 = bracketing_upsilon(fc3, 1, u1, 1e-12);
    CHECK((b0.zcfg - z).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((b1.zcfg - z).cwiseAbs().maxCoeff() < 1e-13);

    Series phi = kz_associator(v1, v1, v1, sc);
    // the ratio of charts as operators: tilde_{b1}^{-1} tilde_{b0} = Phi
    Series ratio = b1.tilde.inverse() * b0.tilde;
    INFO("|ratio - phi| = ", (ratio - phi).norm(), "  |ratio - phi^{-1}| = ", (ratio - phi.inverse()).norm());
    CHECK((ratio - phi).norm() < 1e-7);

    // identity pair
    CHECK((b0.tilde.inverse() * b0.tilde - Series::identity(sc.order, 8)).norm() < 1e-12);

    // regularized limits reproduce the coproducts of the twist
    Series j3 = fusion_j3(fc3, z);
    Series rlim0 = bracket_rlim(b0, j3);
    Series rlim1 = bracket_rlim(b1, j3);

    auto vv = tensor({v1, v1});
    Tensors tvv(vv);
    FusionContext fvv{&vv, &tvv, sc, 0, mu};
    Series f = differential_twist(fvv, +1).value;
    auto v12_3 = tensor({as_single_leg(vv), v1});
    Tensors t123(v12_3);
    FusionContext f123{&v12_3, &t123, sc, 0, mu};
    Series f_12_3 = differential_twist(f123, +1).value;
    auto v1_23 = tensor({v1, as_single_leg(vv)});
    Tensors t1_23(v1_23);
    FusionContext f1_23{&v1_23, &t1_23, sc, 0, mu};
    Series f_1_23 = differential_twist(f1_23, +1).value;

    Series f_x_1(sc.order, 8), one_x_f(sc.order, 8);
    for (int k = 0; k <= sc.order; ++k) {
        f_x_1[k] = kron(f[k], Mat::Identity(2, 2));
        one_x_f[k] = kron(Mat::Identity(2, 2), f[k]);
    }
    Series expect0 = f_12_3 * f_x_1;   // Delta x id (J) . J x 1
    Series expect1 = f_1_23 * one_x_f; // id x Delta (J) . 1 x J
    INFO("|rlim0 - expect0| = ", (rlim0 - expect0).norm());
    INFO("|rlim1 - expect1| = ", (rlim1 - expect1).norm());
    CHECK((rlim0 - expect0).norm() < 1e-7);
    CHECK((rlim1 - expect1).norm() < 1e-7);
}

TEST_CASE("rank-one welding report passes at order 3") {
    Scale sc = formal_scale(3);
    auto v1 = sl2_irrep(1);
    Vec mu(1);
    mu << Cx(0, 1.3);
    auto rep = assemble_qcqtqba(v1, sc, mu, 1e-7, 1e-10);
    for (const auto& c : rep.checks) {
        INFO(c.identity, " residual ", c.residual);
        CHECK(c.pass);
    }
    CHECK(rep.checks.size() >= 3);
}

TEST_CASE("structural twists of orthogonal blocks commute") {
    // A3 with singleton blocks {0} and {2}
    Scale sc = formal_scale(2);
    auto sl4 = sln_defining(4);
    Vec mu(3);
    mu << Cx(0, 1.9), Cx(0, 1.2), Cx(0, 0.8);
    auto pairrep = tensor({sl4, sl4});
    Tensors t2(pairrep);
    auto r0 = centraliser_constant(sl4, sl4, sc, 1u, mu, 0, +1, AnchorParams{}, false);
    auto r2 = centraliser_constant(sl4, sl4, sc, 4u, mu, 2, +1, AnchorParams{}, false);
    Series f0 = r0.relative_twist, f2 = r2.relative_twist;
    CHECK((f0 * f2 - f2 * f0).norm() < 1e-10);
}
