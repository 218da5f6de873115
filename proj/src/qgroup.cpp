#include "casmon/qgroup.hpp"

#include <algorithm>

namespace casmon {

namespace {

// e^{expo * d * hbar} as a scalar series in the ring of `scale`
SSeries q_pow(const Scale& scale, double d, double expo) {
    SSeries x(scale.ring_order());
    if (scale.formal) {
        if (scale.order >= 1) x.c[1] = expo * d;
    } else {
        x.c[0] = expo * d * scale.hbar;
    }
    return x.exp();
}

SSeries q_int(const Scale& scale, double d, int n) {
    // [n] = sum_{k=0}^{n-1} q^{n-1-2k}, [-n] = -[n]
    SSeries acc(scale.ring_order());
    int s = n < 0 ? -1 : 1;
    for (int k = 0; k < s * n; ++k) acc = acc + q_pow(scale, d, double(s * n - 1 - 2 * k));
    return double(s) * acc;
}

SSeries q_factorial(const Scale& scale, double d, int n) {
    SSeries acc = SSeries::one(scale.ring_order());
    for (int k = 2; k <= n; ++k) acc = acc * q_int(scale, d, k);
    return acc;
}

Series scalar_diag(const Scale& scale, const std::vector<SSeries>& entries) {
    int n = int(entries.size());
    Series out(scale.ring_order(), n);
    for (int k = 0; k <= scale.ring_order(); ++k)
        for (int a = 0; a < n; ++a) out[k](a, a) = entries[a].c[k];
    return out;
}

Series scalar_times(const SSeries& s, const Series& m) {
    Series out(m.order(), m.dim());
    for (int k = 0; k <= m.order(); ++k)
        for (int i = 0; i <= k; ++i) out[k] += s.c[i] * m[k - i];
    return out;
}

bool same_matrix(const Mat& a, const Mat& b) { return a.rows() == b.rows() && mat_norm(a - b) < 1e-12; }

}  // namespace

Series QRepresentation::leg(int i, const Series& m) const {
    Series out = Series::identity(scale.ring_order(), 1);
    for (int k = 0; k < legs(); ++k) {
        if (k == i) out = kron_series(out, m);
        else out = kron_series(out, Series::identity(scale.ring_order(), factor_dims[k]));
    }
    return out;
}

double QRepresentation::qi_log(int vertex) const { return rs->simple_norm2(vertex) / 2.0; }

Series QRepresentation::k_power(int vertex, double expo) const {
    std::vector<SSeries> d;
    for (int a = 0; a < dim; ++a) d.push_back(q_pow(scale, qi_log(vertex), expo * H[vertex](a, a).real()));
    return scalar_diag(scale, d);
}

Series QRepresentation::k_power_factor(int fct, int vertex, double expo) const {
    std::vector<SSeries> d;
    for (int a = 0; a < factor_dims[fct]; ++a)
        d.push_back(q_pow(scale, qi_log(vertex), expo * fH[fct][vertex](a, a).real()));
    return scalar_diag(scale, d);
}

double QRepresentation::relation_residual() const {
    const auto& a = rs->cartan();
    int r = rs->rank();
    double res = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            Series hs = Series::constant(scale.ring_order(), H[i]);
            res = std::max(res, (hs * E[j] - E[j] * hs - Cx(a(i, j)) * E[j]).norm());
            res = std::max(res, (hs * F[j] - F[j] * hs + Cx(a(i, j)) * F[j]).norm());
            // [E_i, F_j] = delta_ij [H_i]_{q_i} as a diagonal matrix
            Series target(scale.ring_order(), dim);
            if (i == j) {
                std::vector<SSeries> d;
                for (int b = 0; b < dim; ++b) d.push_back(q_int(scale, qi_log(i), int(std::lround(H[i](b, b).real()))));
                target = scalar_diag(scale, d);
            }
            res = std::max(res, (E[i] * F[j] - F[j] * E[i] - target).norm());
            if (i != j && a(i, j) <= 0) {
                int n = 1 - a(i, j);
                SSeries fsn = q_factorial(scale, qi_log(i), n);
                Series se(scale.ring_order(), dim), sf(scale.ring_order(), dim);
                for (int k = 0; k <= n; ++k) {
                    SSeries binom = fsn * (q_factorial(scale, qi_log(i), k) * q_factorial(scale, qi_log(i), n - k)).inverse();
                    Series epow_l = Series::identity(scale.ring_order(), dim), epow_r = epow_l;
                    Series fpow_l = epow_l, fpow_r = epow_l;
                    for (int t = 0; t < k; ++t) { epow_l = epow_l * E[i]; fpow_l = fpow_l * F[i]; }
                    for (int t = 0; t < n - k; ++t) { epow_r = epow_r * E[i]; fpow_r = fpow_r * F[i]; }
                    Cx sgn = (k % 2) ? Cx(-1) : Cx(1);
                    se += scalar_times(sgn * binom, epow_l * E[j] * epow_r);
                    sf += scalar_times(sgn * binom, fpow_l * F[j] * fpow_r);
                }
                res = std::max(res, se.norm());
                res = std::max(res, sf.norm());
            }
        }
    return res;
}

QRepresentation q_deform(const Representation& rep, const Scale& scale) {
    QRepresentation out;
    bool first = true;
    for (int fct = 0; fct < rep.legs(); ++fct) {
        Representation single;
        single.rs = rep.rs;
        single.dim = rep.factor_dims[fct];
        single.e = rep.fe[fct];
        single.f = rep.ff[fct];
        single.h = rep.fh[fct];
        single.factor_dims = {single.dim};
        single.fe = {single.e};
        single.ff = {single.f};
        single.fh = {single.h};
        single.index = {rep.index[fct]};
        single.weights.resize(single.dim, rep.rs->rank());
        for (int i = 0; i < rep.rs->rank(); ++i)
            for (int b = 0; b < single.dim; ++b) single.weights(b, i) = single.h[i](b, b).real();

        QRepresentation q;
        q.rs = rep.rs;
        q.scale = scale;
        q.dim = single.dim;
        q.classical = single;
        q.factor_dims = {single.dim};
        q.H = single.h;
        q.fH = {single.h};
        int rk = rep.rs->rank();
        int N = scale.ring_order();

        if (rk == 1 && (single.dim == 1 || same_matrix(single.f[0], sl2_irrep(single.dim - 1).f[0]))) {
            int m = single.dim - 1;
            Series e(N, m + 1), f(N, m + 1);
            double d = q.qi_log(0);
            for (int j = 0; j <= m; ++j) {
                if (j < m) f[0](j + 1, j) = 1.0;
                if (j > 0) {
                    SSeries v = q_int(scale, d, j) * q_int(scale, d, m - j + 1);
                    for (int k = 0; k <= N; ++k) e[k](j - 1, j) = v.c[k];
                }
            }
            q.E = {e};
            q.F = {f};
        } else if (rk >= 2 && single.dim == rk + 1 && same_matrix(single.e[0], sln_defining(rk + 1).e[0])) {
            for (int i = 0; i < rk; ++i) {
                q.E.push_back(Series::constant(N, single.e[i]));
                q.F.push_back(Series::constant(N, single.f[i]));
            }
        } else {
            throw Error("RelationViolation", "quantum deformation is built in for sl2 irreps and defining reps only");
        }
        q.fE = {q.E};
        q.fF = {q.F};

        out = first ? q : q_tensor(out, q);
        first = false;
    }
    double res = out.relation_residual();
    if (res > 1e-10) throw Error("RelationViolation", "deformed matrices violate the quantum relations");
    return out;
}

QRepresentation q_tensor(const QRepresentation& a, const QRepresentation& b) {
    QRepresentation out;
    out.rs = a.rs;
    out.scale = a.scale;
    out.dim = a.dim * b.dim;
    out.classical = tensor({a.classical, b.classical});
    out.factor_dims = a.factor_dims;
    out.factor_dims.insert(out.factor_dims.end(), b.factor_dims.begin(), b.factor_dims.end());
    out.fE = a.fE;
    out.fE.insert(out.fE.end(), b.fE.begin(), b.fE.end());
    out.fF = a.fF;
    out.fF.insert(out.fF.end(), b.fF.begin(), b.fF.end());
    out.fH = a.fH;
    out.fH.insert(out.fH.end(), b.fH.begin(), b.fH.end());
    int N = a.scale.ring_order();
    int rk = a.rs->rank();
    for (int i = 0; i < rk; ++i) {
        Series ida = Series::identity(N, a.dim), idb = Series::identity(N, b.dim);
        // Delta(E) = E x 1 + q^H x E, Delta(F) = F x q^{-H} + 1 x F
        out.E.push_back(kron_series(a.E[i], idb) + kron_series(a.k_power(i, 1.0), b.E[i]));
        out.F.push_back(kron_series(a.F[i], b.k_power(i, -1.0)) + kron_series(ida, b.F[i]));
        out.H.push_back(kron(a.H[i], Mat::Identity(b.dim, b.dim)) + kron(Mat::Identity(a.dim, a.dim), b.H[i]));
    }
    return out;
}

Series quantum_weyl(const QRepresentation& qr, int vertex, bool variant_c) {
    int N = qr.scale.ring_order();
    int dim = qr.dim;
    double d = qr.qi_log(vertex);
    std::vector<Series> epow{Series::identity(N, dim)}, fpow{Series::identity(N, dim)};
    while (epow.back().norm() > 1e-13 && int(epow.size()) <= dim + 1) epow.push_back(epow.back() * qr.E[vertex]);
    while (fpow.back().norm() > 1e-13 && int(fpow.size()) <= dim + 1) fpow.push_back(fpow.back() * qr.F[vertex]);
    int amax = int(epow.size()) - 1, bmax = int(fpow.size()) - 1;

    std::vector<SSeries> inv_fact{SSeries::one(N)};
    for (int k = 1; k <= std::max(amax, bmax); ++k) inv_fact.push_back(q_factorial(qr.scale, d, k).inverse());

    Series s(N, dim);
    std::vector<int> weights(dim);
    for (int col = 0; col < dim; ++col) weights[col] = int(std::lround(qr.H[vertex](col, col).real()));
    std::vector<int> distinct = weights;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int m : distinct) {
        Series block(N, dim);
        for (int a = 0; a <= amax; ++a)
            for (int c = 0; c <= amax; ++c) {
                int b = a + c + m;
                if (b < 0 || b > bmax) continue;
                Series term = scalar_times(inv_fact[a], epow[a]) * scalar_times(inv_fact[b], fpow[b]) *
                              scalar_times(inv_fact[c], epow[c]);
                SSeries coef = q_pow(qr.scale, d, double(b - a * c));
                Cx sgn = (b % 2) ? Cx(-1) : Cx(1);
                block += scalar_times(sgn * coef, term);
            }
        for (int col = 0; col < dim; ++col)
            if (weights[col] == m)
                for (int k = 0; k <= N; ++k) s[k].col(col) = block[k].col(col);
    }
    if (variant_c) {
        std::vector<SSeries> diag;
        for (int a = 0; a < dim; ++a) {
            double h = qr.H[vertex](a, a).real();
            diag.push_back(q_pow(qr.scale, d, h * h / 4.0));
        }
        s = s * scalar_diag(qr.scale, diag);
    }
    return s;
}

Series sl2_r_bar(const QRepresentation& qr, int vertex) {
    // quasi-R part fitting Delta(E) = E x 1 + q^H x E: powers of F x E
    if (qr.legs() != 2) throw Error("LegMismatch", "sl2 R-matrix needs a two-factor deformation");
    int N = qr.scale.ring_order();
    double d = qr.qi_log(vertex);
    SSeries qdiff = q_pow(qr.scale, d, 1.0) - q_pow(qr.scale, d, -1.0);
    Series fa = Series::identity(N, qr.factor_dims[0]), eb = Series::identity(N, qr.factor_dims[1]);
    Series acc(N, qr.dim);
    SSeries coef = SSeries::one(N);
    int n = 0;
    while (true) {
        Series term = scalar_times(coef, kron_series(fa, eb));
        acc += term;
        if (term.norm() < 1e-14 || n > qr.dim) break;
        ++n;
        fa = fa * qr.fF[0][vertex];
        eb = eb * qr.fE[1][vertex];
        coef = q_pow(qr.scale, d, double(n * (n - 1)) / 2.0);
        for (int k = 0; k < n; ++k) coef = coef * qdiff;
        coef = coef * q_factorial(qr.scale, d, n).inverse();
    }
    return acc;
}

Series coproduct_twist_factor(const QRepresentation& qr, int vertex) {
    if (qr.legs() != 2) throw Error("LegMismatch", "coproduct factor needs a two-factor deformation");
    int N = qr.scale.ring_order();
    double d = qr.qi_log(vertex);
    SSeries qdiff = q_pow(qr.scale, d, 1.0) - q_pow(qr.scale, d, -1.0);
    Series a1 = qr.k_power_factor(0, vertex, -1.0) * qr.fE[0][vertex];  // q^{-H} E
    Series b1 = qr.fF[1][vertex] * qr.k_power_factor(1, vertex, 1.0);   // F q^{H}
    Series ap = Series::identity(N, qr.factor_dims[0]), bp = Series::identity(N, qr.factor_dims[1]);
    Series acc(N, qr.dim);
    SSeries coef = SSeries::one(N);
    int n = 0;
    while (true) {
        Series term = scalar_times(coef, kron_series(ap, bp));
        acc += term;
        if (term.norm() < 1e-14 || n > qr.dim) break;
        ++n;
        ap = ap * a1;
        bp = bp * b1;
        coef = q_pow(qr.scale, d, double(n * (n - 1)) / 2.0);
        for (int k = 0; k < n; ++k) coef = coef * qdiff;
        coef = coef * q_factorial(qr.scale, d, n).inverse();
    }
    return acc;
}

Series sl2_r_matrix(const QRepresentation& qr, int vertex) {
    double d = qr.qi_log(vertex);
    std::vector<SSeries> diag;
    int da = qr.factor_dims[0], db = qr.factor_dims[1];
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b)
            diag.push_back(q_pow(qr.scale, d, 0.5 * qr.fH[0][vertex](a, a).real() * qr.fH[1][vertex](b, b).real()));
    return scalar_diag(qr.scale, diag) * sl2_r_bar(qr, vertex);
}

Mat squares_rhs(const QRepresentation& qr, int vertex, bool variant_c, Cx hbar) {
    double d = qr.qi_log(vertex);
    Cx q = std::exp(d * hbar), qinv = Cx(1) / q;
    Mat e = qr.E[vertex].eval(hbar), f = qr.F[vertex].eval(hbar);
    Mat k = qr.k_power(vertex, 1.0).eval(hbar), kinv = qr.k_power(vertex, -1.0).eval(hbar);
    Mat cas = f * e * std::pow(q - qinv, 2) + q * k + qinv * kinv;  // acts by q^{m+1} + q^{-(m+1)}
    Eigen::ComplexEigenSolver<Mat> es(cas);
    Mat v = es.eigenvectors();
    Mat vinv = v.partialPivLu().solve(Mat::Identity(qr.dim, qr.dim));
    Mat cmat = Mat::Zero(qr.dim, qr.dim);
    for (int a = 0; a < qr.dim; ++a) {
        Cx gamma = es.eigenvalues()(a);
        Cx mp1 = std::acosh(gamma / 2.0) / (d * hbar);
        int m = std::max(0, int(std::lround(mp1.real())) - 1);
        double cval = d * 0.5 * m * (m + 2);  // (alpha,alpha)/2 * m(m+2)/2
        cmat += cval * (v.col(a) * vinv.row(a));
    }
    Mat h = qr.H[vertex];
    if (!variant_c) cmat -= 0.5 * d * h * h;  // kappa = C - (alpha,alpha)/4 H^2
    Mat sign = Mat::Zero(qr.dim, qr.dim);
    for (int a = 0; a < qr.dim; ++a) sign(a, a) = std::exp(kPi * kI * h(a, a));
    return sign * expm(hbar * cmat);
}

double spectrum_distance(const Mat& a, const Mat& b) {
    Eigen::ComplexEigenSolver<Mat> ea(a), eb(b);
    int n = int(a.rows());
    std::vector<Cx> va, vb;
    for (int i = 0; i < n; ++i) {
        va.push_back(ea.eigenvalues()(i));
        vb.push_back(eb.eigenvalues()(i));
    }
    if (n <= 8) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        double best = 1e30;
        do {
            double cost = 0;
            for (int i = 0; i < n; ++i) cost = std::max(cost, std::abs(va[i] - vb[perm[i]]));
            best = std::min(best, cost);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    std::vector<bool> used(n, false);
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        int bestj = -1;
        double bestd = 1e30;
        for (int j = 0; j < n; ++j)
            if (!used[j] && std::abs(va[i] - vb[j]) < bestd) {
                bestd = std::abs(va[i] - vb[j]);
                bestj = j;
            }
        used[bestj] = true;
        worst = std::max(worst, bestd);
    }
    return worst;
}

VerificationReport monodromy_equivalence(const Representation& rep, const std::vector<BraidWord>& words,
                                         const EquivalenceOptions& opt) {
    VerificationReport out;
    Tensors tens(rep);

    {
        Scale sc;
        sc.formal = true;
        sc.order = opt.order;
        auto ctx = make_dcp(rep, tens, sc, opt.variant_c);
        BraidMonodromy mon(ctx, 0, 1e-12);
        QRepresentation qr = q_deform(rep, sc);
        std::vector<Series> qgens;
        for (int i = 0; i < rep.rs->rank(); ++i) qgens.push_back(quantum_weyl(qr, i, opt.variant_c));
        int w_idx = 0;
        for (const auto& w : words) {
            Series nabla = mon.word(w);
            Series quantum = Series::identity(sc.order, rep.dim);
            for (int letter : w.letters) {
                const Series& g = qgens[std::abs(letter) - 1];
                quantum = quantum * (letter > 0 ? g : g.inverse());
            }
            double res = 0;
            for (int k = 0; k <= sc.order; ++k) res = std::max(res, std::abs(nabla.trace_coeff(k) - quantum.trace_coeff(k)));
            out.add("trace series word " + std::to_string(w_idx), res, opt.tol_series, {{"order", sc.order}});
            ++w_idx;
        }
    }

    for (Cx hb : opt.hbar_samples) {
        Scale sc;
        sc.formal = false;
        sc.hbar = hb;
        auto ctx = make_dcp(rep, tens, sc, opt.variant_c);
        BraidMonodromy mon(ctx, 0, 1e-12);
        QRepresentation qr = q_deform(rep, sc);
        std::vector<Series> qgens;
        for (int i = 0; i < rep.rs->rank(); ++i) qgens.push_back(quantum_weyl(qr, i, opt.variant_c));
        int w_idx = 0;
        for (const auto& w : words) {
            Series nabla = mon.word(w);
            Series quantum = Series::identity(0, rep.dim);
            for (int letter : w.letters) {
                const Series& g = qgens[std::abs(letter) - 1];
                quantum = quantum * (letter > 0 ? g : g.inverse());
            }
            double res = spectrum_distance(nabla[0], quantum[0]);
            out.add("spectrum word " + std::to_string(w_idx) + " at hbar " + std::to_string(hb.real()), res, opt.tol_numeric,
                    {{"hbar_re", hb.real()}, {"hbar_im", hb.imag()}});
            ++w_idx;
        }
    }
    return out;
}

}  // namespace casmon
