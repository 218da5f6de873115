#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casmon/diagrams.hpp"

#include <random>

using namespace casmon;

namespace {
Eigen::MatrixXi cartan_a(int rank) {
    Eigen::MatrixXi c(rank, rank);
    c.setZero();
    for (int i = 0; i < rank; ++i) {
        c(i, i) = 2;
        if (i + 1 < rank) { c(i, i + 1) = -1; c(i + 1, i) = -1; }
    }
    return c;
}
}  // namespace

TEST_CASE("A2 has two MNS with the expected marked vertices") {
    Diagram d = Diagram::type_a(2);
    auto fam = enumerate_nested_sets(d);
    REQUIRE(fam.mns.size() == 2);
    for (const auto& m : fam.mns) {
        CHECK(m.elements.size() == 2);
        CHECK(m.elements[1] == 3u);
        // the marked vertex of D is the one not covered by the singleton
        int single = __builtin_ctz(m.elements[0]);
        CHECK(m.marked.at(3u) == 1 - single);
    }
    // {D} is the unique maximal element of the nested-set poset
    int count_min = 0;
    for (const auto& ns : fam.nested_sets)
        if (ns.size() == 1) ++count_min;
    CHECK(count_min == 1);
}

TEST_CASE("type-A MNS counts match bracketings by independent enumeration") {
    for (int letters = 2; letters <= 6; ++letters) {
        Diagram d = Diagram::type_a(letters - 1);
        auto fam = enumerate_nested_sets(d);
        CHECK(long(fam.mns.size()) == count_bracketings(letters));
        for (const auto& m : fam.mns) CHECK(int(m.elements.size()) == letters - 1);
    }
}

TEST_CASE("every MNS has |D| elements, all compatible, marked vertex well defined") {
    Diagram d = Diagram::type_a(3);
    auto fam = enumerate_nested_sets(d);
    CHECK(fam.mns.size() == 5);
    for (const auto& m : fam.mns) {
        CHECK(m.elements.size() == 3);
        for (size_t a = 0; a < m.elements.size(); ++a)
            for (size_t b = a + 1; b < m.elements.size(); ++b) CHECK(d.compatible(m.elements[a], m.elements[b]));
        for (Subdiag b : m.elements) {
            // maximal proper elements cover all vertices except the marked one
            Subdiag cover = 0;
            for (Subdiag c : m.elements)
                if (c != b && subdiag_contains(b, c)) cover |= c;
            Subdiag missing = b & ~cover;
            CHECK(subdiag_size(missing) == 1);
            CHECK(__builtin_ctz(missing) == m.marked.at(b));
        }
    }
}

TEST_CASE("compatibility is symmetric and orthogonality implies compatibility") {
    Diagram d = Diagram::type_a(3);
    auto subs = d.connected_subdiagrams();
    for (Subdiag a : subs)
        for (Subdiag b : subs) {
            CHECK(d.compatible(a, b) == d.compatible(b, a));
            if (d.orthogonal(a, b)) CHECK(d.compatible(a, b));
        }
}

TEST_CASE("disconnected diagram rejected") {
    Diagram d(2, {});
    CHECK_THROWS_WITH_AS(enumerate_nested_sets(d), doctest::Contains("Disconnected"), Error);
}

TEST_CASE("pair data: elementary pair on A2, identity pair, chains on A3") {
    Diagram d2 = Diagram::type_a(2);
    auto fam2 = enumerate_nested_sets(d2);
    auto pd = mns_pair_data(d2, fam2, 0, 1);
    CHECK(pd.elementary);
    CHECK(pd.supp == 3u);
    CHECK(pd.zsupp == 0u);

    auto pid = mns_pair_data(d2, fam2, 1, 1);
    CHECK_FALSE(pid.elementary);
    CHECK(pid.chain.size() == 1);

    Diagram d3 = Diagram::type_a(3);
    auto fam3 = enumerate_nested_sets(d3);
    // the two extreme bracketings ((xx)x)x <-> {1},{12},{123} and x(x(xx)) <-> {3},{23},{123}
    int left = -1, right = -1;
    for (size_t i = 0; i < fam3.mns.size(); ++i) {
        const auto& e = fam3.mns[i].elements;
        if (e == std::vector<Subdiag>{1u, 3u, 7u}) left = int(i);
        if (e == std::vector<Subdiag>{4u, 6u, 7u}) right = int(i);
    }
    REQUIRE(left >= 0);
    REQUIRE(right >= 0);
    auto chain = mns_pair_data(d3, fam3, left, right);
    CHECK(chain.chain.size() >= 3);  // at least two elementary steps
    for (size_t k = 0; k + 1 < chain.chain.size(); ++k) {
        auto step = mns_pair_data(d3, fam3, chain.chain[k], chain.chain[k + 1]);
        CHECK(step.elementary);
    }
}

TEST_CASE("standard adapted family on A2: values and basis condition") {
    auto rs = build_root_system(cartan_a(2));
    Diagram d = Diagram::from_root_system(*rs);
    auto fam = enumerate_nested_sets(d);
    auto ad = AdaptedFamily::standard(*rs, d);
    CHECK(ad.x(1u)(0) == doctest::Approx(1));
    CHECK(ad.x(1u)(1) == doctest::Approx(0));
    CHECK(ad.x(3u)(0) == doctest::Approx(2));
    CHECK(ad.x(3u)(1) == doctest::Approx(2));
    verify_adapted(*rs, d, fam, ad);

    // a degenerate user family is rejected with the offending pair named
    std::map<Subdiag, RVec> bad;
    for (Subdiag b : d.connected_subdiagrams()) bad[b] = ad.x(3u);  // all equal to x_D
    AdaptedFamily degenerate(*rs, d, bad);
    CHECK_THROWS_WITH_AS(verify_adapted(*rs, d, fam, degenerate), doctest::Contains("BasisDegenerate"), Error);
}

TEST_CASE("A1 chart: alpha = u_D exactly") {
    Eigen::MatrixXi c(1, 1);
    c << 2;
    auto rs = build_root_system(c);
    Diagram d = Diagram::from_root_system(*rs);
    auto fam = enumerate_nested_sets(d);
    auto ad = AdaptedFamily::standard(*rs, d);
    BlowupChart chart(*rs, d, fam.mns[0], ad);
    const auto& rp = chart.root_pulls()[0];
    CHECK(rp.terms.size() == 1);
    CHECK(std::abs(rp.a - Cx(1)) < 1e-14);
    Vec u(1);
    u << Cx(0.3, 0.1);
    CHECK(std::abs(chart.eval_p_alpha(rp, u) - Cx(1)) < 1e-14);
}

TEST_CASE("A2 chart: pullback data and round trips") {
    auto rs = build_root_system(cartan_a(2));
    Diagram d = Diagram::from_root_system(*rs);
    auto fam = enumerate_nested_sets(d);
    auto ad = AdaptedFamily::standard(*rs, d);
    int fidx = fam.mns[0].elements[0] == 1u ? 0 : 1;  // chart of F = {{0}, D}
    BlowupChart chart(*rs, d, fam.mns[fidx], ad);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vec u(2);
        u << Cx(U(rng), 0.3 * U(rng)), Cx(U(rng), -0.2 * U(rng));
        Vec x = chart.u_to_x(u);
        CHECK((chart.x_to_u(x) - u).cwiseAbs().maxCoeff() < 1e-14);
        Vec pt = chart.x_to_point(x);
        CHECK((chart.point_to_x(pt) - x).cwiseAbs().maxCoeff() < 1e-13);
        for (int k = 0; k < 2; ++k) {
            Cx val = ad.eval(chart.mns().elements[k], pt);
            CHECK(std::abs(val - x(k)) < 1e-12);
        }
        // pullback identity alpha(pt) = a_B prod u_C P_alpha(u) for every positive root
        for (const auto& rp : chart.root_pulls()) {
            Cx lhs = 0;
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) lhs += double(rs->pos_root(rp.root)(j)) * pt(k) * double(rs->cartan()(k, j));
            Cx prod = 1;
            for (int c = 0; c < 2; ++c)
                if (subdiag_contains(chart.mns().elements[c], chart.mns().elements[rp.min_elt])) prod *= u(c);
            Cx rhs = rp.a * prod * chart.eval_p_alpha(rp, u);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
    for (const auto& rp : chart.root_pulls()) {
        Vec u0 = Vec::Zero(2);
        CHECK(std::abs(chart.eval_p_alpha(rp, u0) - Cx(1)) < 1e-14);
    }
}

TEST_CASE("forgetful data: equal symmetric differences give equal supports") {
    // on A3 the exchanged pair determines the ambient MNS pair, so the first
    // diagram with nontrivial forgetfulness classes is A4
    Diagram d3 = Diagram::type_a(4);
    auto fam3 = enumerate_nested_sets(d3);
    int n = int(fam3.mns.size());
    int forget_classes = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            auto p1 = mns_pair_data(d3, fam3, a, b);
            if (!p1.elementary) continue;
            for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                    if (c == e || (c == a && e == b)) continue;
                    auto p2 = mns_pair_data(d3, fam3, c, e);
                    if (!p2.elementary) continue;
                    std::vector<Subdiag> d1, d2, g1, g2;
                    for (Subdiag x : fam3.mns[a].elements)
                        if (!fam3.mns[b].contains(x)) d1.push_back(x);
                    for (Subdiag x : fam3.mns[c].elements)
                        if (!fam3.mns[e].contains(x)) d2.push_back(x);
                    for (Subdiag x : fam3.mns[b].elements)
                        if (!fam3.mns[a].contains(x)) g1.push_back(x);
                    for (Subdiag x : fam3.mns[e].elements)
                        if (!fam3.mns[c].contains(x)) g2.push_back(x);
                    if (d1 == d2 && g1 == g2) {
                        ++forget_classes;
                        CHECK(p1.supp == p2.supp);
                        CHECK(p1.zsupp == p2.zsupp);
                    }
                }
        }
    CHECK(forget_classes > 0);
}
