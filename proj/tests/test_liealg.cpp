#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casmon/liealg.hpp"

#include <random>

using namespace casmon;

namespace {
Eigen::MatrixXi cartan_a2() {
    Eigen::MatrixXi c(2, 2);
    c << 2, -1, -1, 2;
    return c;
}
Eigen::MatrixXi cartan_b2() {
    Eigen::MatrixXi c(2, 2);
    c << 2, -1, -2, 2;
    return c;
}
}  // namespace

TEST_CASE("A2 closure gives three positive roots") {
    auto rs = build_root_system(cartan_a2());
    CHECK(rs->num_positive() == 3);
    CHECK(rs->connected());
    // highest root a1 + a2 present
    bool found = false;
    for (int r = 0; r < 3; ++r)
        if (rs->pos_root(r).sum() == 2) found = true;
    CHECK(found);
}

TEST_CASE("rank-one normalization") {
    Eigen::MatrixXi c(1, 1);
    c << 2;
    auto rs = build_root_system(c);
    CHECK(rs->num_positive() == 1);
    CHECK(rs->root_norm2(0) == doctest::Approx(2.0));
    CHECK(rs->coweight_norm2(0) == doctest::Approx(0.5));
    // a(lambda^vee) = 1
    CHECK(rs->pairing(0, rs->fundamental_coweight(0)) == doctest::Approx(1.0));
}

TEST_CASE("B2 and G2 cardinalities, rank cap") {
    CHECK(build_root_system(cartan_b2())->num_positive() == 4);
    Eigen::MatrixXi g2(2, 2);
    g2 << 2, -1, -3, 2;
    CHECK(build_root_system(g2)->num_positive() == 6);
    Eigen::MatrixXi a3(3, 3);
    a3 << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK(build_root_system(a3)->num_positive() == 6);
    Eigen::MatrixXi a4(4, 4);
    a4.setZero();
    for (int i = 0; i < 4; ++i) a4(i, i) = 2;
    CHECK_THROWS_WITH_AS(build_root_system(a4), doctest::Contains("RankTooLarge"), Error);
}

TEST_CASE("disconnected diagram reported with component split") {
    Eigen::MatrixXi c(2, 2);
    c << 2, 0, 0, 2;
    auto rs = build_root_system(c);
    CHECK_FALSE(rs->connected());
    CHECK(rs->components().size() == 2);
}

TEST_CASE("invalid Cartan matrices rejected") {
    Eigen::MatrixXi c(2, 2);
    c << 2, 1, 1, 2;
    CHECK_THROWS_WITH_AS(build_root_system(c), doctest::Contains("NotCartan"), Error);
    Eigen::MatrixXi aff(2, 2);
    aff << 2, -2, -2, 2;  // affine A1: form degenerate
    CHECK_THROWS_WITH_AS(build_root_system(aff), doctest::Contains("NotCartan"), Error);
}

TEST_CASE("sl2 irreps: relations, h spectrum, Casimir") {
    auto v2 = sl2_irrep(2);
    CHECK(v2.dim == 3);
    CHECK(v2.relation_residual() < 1e-12);
    CHECK(v2.h[0](0, 0).real() == doctest::Approx(2));
    CHECK(v2.h[0](1, 1).real() == doctest::Approx(0));
    CHECK(v2.h[0](2, 2).real() == doctest::Approx(-2));
    Tensors t(v2);
    Mat cas = t.casimir(1u);
    CHECK(mat_norm(cas - 4.0 * Mat::Identity(3, 3)) < 1e-12);
    // K on V2 is diag(2,4,2)
    Mat k = t.k_sub(1u);
    CHECK(std::abs(k(0, 0) - Cx(2)) < 1e-12);
    CHECK(std::abs(k(1, 1) - Cx(4)) < 1e-12);
    CHECK(std::abs(k(2, 2) - Cx(2)) < 1e-12);
    // trivial rep: everything zero, realizes the counit slot
    auto v0 = sl2_irrep(0);
    CHECK(v0.dim == 1);
    CHECK(mat_norm(v0.e[0]) == 0);
}

TEST_CASE("sl3 defining rep satisfies Serre relations exactly") {
    auto v = sln_defining(3);
    CHECK(v.relation_residual() < 1e-14);
}

TEST_CASE("tensor products act by the iterated coproduct") {
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v1, v1});
    CHECK(vv.dim == 4);
    CHECK(vv.relation_residual() < 1e-12);
    Tensors t(vv);
    Mat om = t.omega(0, 1, 1u);
    Eigen::ComplexEigenSolver<Mat> es(om);
    std::vector<double> evs;
    for (int i = 0; i < 4; ++i) evs.push_back(es.eigenvalues()(i).real());
    std::sort(evs.begin(), evs.end());
    CHECK(evs[0] == doctest::Approx(-1.5));
    CHECK(evs[1] == doctest::Approx(0.5));
    CHECK(evs[3] == doctest::Approx(0.5));
    // Lambda on V1 x V1 equals (h x h)/2
    Mat lam = t.lambda(0, 0, 1);
    Mat hh = vv.leg(0, v1.h[0]) * vv.leg(1, v1.h[0]);
    CHECK(mat_norm(lam - 0.5 * hh) < 1e-12);

    // trivial factor kills leg-1 operators
    auto tv = tensor({sl2_irrep(0), v1});
    Tensors tt(tv);
    CHECK(mat_norm(tt.omega(0, 1, 1u)) < 1e-14);

    auto vvv = tensor({v1, v1, v1});
    Mat h3 = vvv.h[0];
    std::set<long> levels;
    for (int b = 0; b < 8; ++b) levels.insert(lround(h3(b, b).real()));
    CHECK(levels.size() == 4);
}

TEST_CASE("root vectors: normalization and sign stability of K") {
    auto sl3 = sln_defining(3);
    RootVectors rv = root_vectors(sl3);
    // pairing 1 for the composite root under the normalized trace form
    double idx = sl3.index[0];
    Cx pair = (rv.xp[2] * rv.xm[2]).trace() / idx;
    CHECK(std::abs(pair - Cx(1)) < 1e-12);
    // [x_a, x_{-a}] is the coroot of a
    Mat br = commutator(rv.xp[2], rv.xm[2]);
    Mat co = sl3.cartan_action(sl3.rs->coroot_of(2));
    CHECK(mat_norm(br - co) < 1e-12);
    // flipping sign of x_alpha leaves K_alpha unchanged
    Tensors t(sl3);
    Mat k = rv.xp[2] * rv.xm[2] + rv.xm[2] * rv.xp[2];
    Mat k_flip = (-rv.xp[2]) * (-rv.xm[2]) + (-rv.xm[2]) * (-rv.xp[2]);
    CHECK(mat_norm(k - k_flip) == 0);
}

TEST_CASE("Omega invariance: coproduct commutes with Omega on tensor squares") {
    auto sl3 = sln_defining(3);
    auto vv = tensor({sl3, sl3});
    Tensors t(vv);
    Subdiag d = 3u;
    Mat om = t.omega(0, 1, d);
    for (int i = 0; i < 2; ++i) {
        CHECK(mat_norm(commutator(vv.e[i], om)) < 1e-12);
        CHECK(mat_norm(commutator(vv.f[i], om)) < 1e-12);
        CHECK(mat_norm(commutator(vv.h[i], om)) < 1e-12);
    }
}

TEST_CASE("projection of Omega onto ker of zeta-weighted mu action is the Cartan part") {
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v1, v1});
    Tensors t(vv);
    Mat om = t.omega(0, 1, 1u), omh = t.omega_h(0, 1, 1u);
    // mu regular, zeta distinct: operator sum_k zeta_k ad(mu^(k)) on End(V x V)
    RVec mu(1);
    mu << 0.7;
    double z1 = 1.3, z2 = -0.4;
    Mat m1 = vv.leg(0, v1.cartan_action_factor(0, mu));
    Mat m2 = vv.leg(1, v1.cartan_action_factor(0, mu));
    // kernel projection is weight-block projection: entries (a,b) with equal weighted weights
    Mat w = z1 * m1 + z2 * m2;
    Mat proj = om;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (std::abs(w(a, a) - w(b, b)) > 1e-9) proj(a, b) = 0;
    CHECK(mat_norm(proj - omh) < 1e-12);
}

TEST_CASE("Delta(K - olK) identity on the A2 tensor square") {
    auto sl3 = sln_defining(3);
    auto vv = tensor({sl3, sl3});
    Tensors t(vv);
    Subdiag full = 3u, sub = 2u;  // olg generated by vertex 2
    Mat dk = t.k_sub(full) - t.k_sub(sub);                       // Delta(K - olK): evaluated in tensor rep
    Tensors tf(sl3);
    Mat k1 = tf.k_sub(full) - tf.k_sub(sub);                     // one-leg value
    Mat lhs = dk - vv.leg(0, k1) - vv.leg(1, k1);
    Mat rhs = 2.0 * (t.omega(0, 1, full) - t.omega(0, 1, sub) - t.lambda(0, 0, 1));
    CHECK(mat_norm(lhs - rhs) < 1e-12);
    // k-olk expressed through Casimirs and the coweight square
    RVec w = sl3.rs->fundamental_coweight(0);
    Mat wsq = sl3.cartan_action(w) * sl3.cartan_action(w);
    Mat viaC = tf.casimir(full) - tf.casimir(sub) - wsq / Cx(sl3.rs->coweight_norm2(0));
    CHECK(mat_norm(k1 - viaC) < 1e-12);

    // rank-one instance (empty complement): Delta(K) = K x 1 + 1 x K + 2(Omega - Lambda)
    auto v1 = sl2_irrep(1);
    auto v11 = tensor({v1, v1});
    Tensors t11(v11);
    Tensors tf1(v1);
    Mat lhs1 = t11.k_sub(1u) - v11.leg(0, tf1.k_sub(1u)) - v11.leg(1, tf1.k_sub(1u));
    Mat rhs1 = 2.0 * (t11.omega(0, 1, 1u) - t11.lambda(0, 0, 1));
    CHECK(mat_norm(lhs1 - rhs1) < 1e-12);
}

TEST_CASE("C_alpha is the sl2-block Casimir") {
    auto v1 = sl2_irrep(1);
    Tensors t(v1);
    CHECK(mat_norm(t.c_alpha(0) - 1.5 * Mat::Identity(2, 2)) < 1e-13);
    auto v3 = sl2_irrep(3);
    Tensors t3(v3);
    CHECK(mat_norm(t3.c_alpha(0) - 7.5 * Mat::Identity(4, 4)) < 1e-12);
}

TEST_CASE("empty subdiagram gives zero tensors") {
    auto v1 = sl2_irrep(1);
    auto vv = tensor({v1, v1});
    Tensors t(vv);
    CHECK(mat_norm(t.omega(0, 1, 0u)) == 0);
    CHECK(mat_norm(t.k_sub(0u)) == 0);
}

TEST_CASE("chevalley twist is a valid representation and theta intertwines on sl2") {
    auto v2 = sl2_irrep(2);
    auto tw = v2.chevalley_twist();
    CHECK(tw.relation_residual() < 1e-12);
    Mat theta = chevalley_theta_matrix(v2);
    CHECK(mat_norm(theta * v2.e[0] + v2.f[0] * theta) < 1e-9);
    CHECK(mat_norm(theta * v2.h[0] + v2.h[0] * theta) < 1e-9);
}
