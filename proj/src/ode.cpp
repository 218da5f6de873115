#include "casmon/ode.hpp"

#include <algorithm>
#include <cmath>

namespace casmon {

LinOp LinOp::left(const Series& m) {
    LinOp o;
    Part p;
    p.has_l = true;
    p.l = m;
    o.parts.push_back(std::move(p));
    return o;
}

LinOp LinOp::right(const Series& m) {
    LinOp o;
    Part p;
    p.has_r = true;
    p.r = m;
    o.parts.push_back(std::move(p));
    return o;
}

LinOp LinOp::ad(const Series& m) {
    LinOp o = left(m);
    o += right(Cx(-1) * m);
    return o;
}

LinOp LinOp::sandwich(const Series& l, const Series& r) {
    LinOp o;
    Part p;
    p.has_l = p.has_r = true;
    p.l = l;
    p.r = r;
    o.parts.push_back(std::move(p));
    return o;
}

LinOp& LinOp::operator+=(const LinOp& o) {
    parts.insert(parts.end(), o.parts.begin(), o.parts.end());
    return *this;
}

LinOp LinOp::scaled(Cx s) const {
    LinOp o = *this;
    for (auto& p : o.parts) {
        if (p.has_l) p.l = s * p.l;
        else p.r = s * p.r;
    }
    return o;
}

Series LinOp::apply(const Series& x) const {
    Series out(x.order(), x.dim());
    for (const auto& p : parts) {
        if (p.has_l && p.has_r) out += p.l * x * p.r;
        else if (p.has_l) out += p.l * x;
        else out += x * p.r;
    }
    return out;
}

double LinOp::min_hbar_weight() const {
    double w = 1e9;
    for (const auto& p : parts) {
        const Series& s = p.has_l ? p.l : p.r;
        for (int k = 0; k <= s.order(); ++k)
            if (mat_norm(s[k]) > 1e-14) { w = std::min(w, double(k)); break; }
    }
    return w;
}

OdeTerm OdeTerm::pole_op(Cx p, LinOp o) {
    OdeTerm t;
    t.kind = PoleOp;
    t.pole = p;
    t.op = std::move(o);
    return t;
}

OdeTerm OdeTerm::const_op(LinOp o) {
    OdeTerm t;
    t.kind = ConstOp;
    t.op = std::move(o);
    return t;
}

OdeTerm OdeTerm::poly_op(std::vector<LinOp> powers) {
    OdeTerm t;
    t.kind = PolyOp;
    t.powers = std::move(powers);
    return t;
}

OdeTerm OdeTerm::entire_left(std::function<std::vector<Mat>(Cx, int)> f, int w) {
    OdeTerm t;
    t.kind = EntireLeft;
    t.entire = std::move(f);
    t.entire_hbar = w;
    return t;
}

OdeTerm OdeTerm::pole_entire_left(Cx p, std::function<std::vector<Mat>(Cx, int)> f, int w) {
    OdeTerm t;
    t.kind = PoleEntireLeft;
    t.pole = p;
    t.entire = std::move(f);
    t.entire_hbar = w;
    return t;
}

std::vector<Cx> OdeSystem::poles() const {
    std::vector<Cx> out;
    for (const auto& t : terms)
        if (t.kind == OdeTerm::PoleOp || t.kind == OdeTerm::PoleEntireLeft) out.push_back(t.pole);
    return out;
}

void PathInC::validate(const std::vector<Cx>& poles) const {
    auto seg_dist = [](Cx a, Cx b, Cx p) {
        Cx ab = b - a;
        double len2 = std::norm(ab);
        if (len2 == 0) return std::abs(p - a);
        double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
        return std::abs(p - (a + t * ab));
    };
    for (size_t k = 0; k + 1 < waypoints.size(); ++k)
        for (Cx p : poles)
            if (seg_dist(waypoints[k], waypoints[k + 1], p) < clearance)
                throw Error("PoleTooClose", "path passes a singularity closer than the clearance radius");
}

std::vector<Cx> circle_path(Cx center, double radius, int segments, Cx dir) {
    std::vector<Cx> pts;
    dir /= std::abs(dir);
    for (int k = 0; k <= segments; ++k) {
        double phi = 2 * kPi * k / segments;
        pts.push_back(center + radius * dir * Cx(std::cos(phi), std::sin(phi)));
    }
    return pts;
}

namespace {

struct TermCache {
    std::vector<Cx> pole_scalars;  // Taylor of 1/(z - p) at the step center
    std::vector<Mat> entire_mats;
    std::vector<Mat> combined;
    std::vector<LinOp> poly_ops;  // PolyOp Taylor coefficients at the center
};

std::vector<TermCache> make_cache(const OdeSystem& ode, Cx z0, int K, bool at_pole_forbidden) {
    std::vector<TermCache> cache(ode.terms.size());
    for (size_t t = 0; t < ode.terms.size(); ++t) {
        const auto& term = ode.terms[t];
        if (term.kind == OdeTerm::PolyOp) {
            int deg = int(term.powers.size()) - 1;
            for (int m = 0; m <= std::min(K, deg); ++m) {
                LinOp acc;
                for (int k = m; k <= deg; ++k) {
                    double binom = 1;
                    for (int j = 0; j < m; ++j) binom *= double(k - j) / (j + 1);
                    Cx zpow = (k == m) ? Cx(1) : std::pow(z0, double(k - m));
                    acc += term.powers[k].scaled(binom * zpow);
                }
                cache[t].poly_ops.push_back(std::move(acc));
            }
        }
        if (term.kind == OdeTerm::PoleOp || term.kind == OdeTerm::PoleEntireLeft) {
            Cx base = z0 - term.pole;
            if (at_pole_forbidden && std::abs(base) < 1e-13) throw Error("PoleTooClose", "expansion centered at a pole");
            Cx inv = Cx(1) / base;
            Cx cur = inv;
            for (int m = 0; m <= K; ++m) { cache[t].pole_scalars.push_back(cur); cur *= -inv; }
        }
        if (term.kind == OdeTerm::EntireLeft || term.kind == OdeTerm::PoleEntireLeft) cache[t].entire_mats = term.entire(z0, K);
        if (term.kind == OdeTerm::PoleEntireLeft) {
            int d = ode.dim;
            for (int m = 0; m <= K; ++m) {
                Mat acc = Mat::Zero(d, d);
                for (int j = 0; j <= m; ++j) acc += cache[t].pole_scalars[j] * cache[t].entire_mats[m - j];
                cache[t].combined.push_back(acc);
            }
        }
    }
    return cache;
}

// accumulate the order-m contribution of all terms applied to the solution coefficients
Series rhs_order(const OdeSystem& ode, const std::vector<TermCache>& cache, const std::vector<Series>& y, int m) {
    int N = y[0].order(), d = y[0].dim();
    Series acc(N, d);
    for (size_t t = 0; t < ode.terms.size(); ++t) {
        const auto& term = ode.terms[t];
        switch (term.kind) {
            case OdeTerm::PoleOp:
                for (int j = 0; j <= m; ++j) acc += term.op.scaled(cache[t].pole_scalars[j]).apply(y[m - j]);
                break;
            case OdeTerm::ConstOp:
                acc += term.op.apply(y[m]);
                break;
            case OdeTerm::PolyOp:
                for (int j = 0; j <= m && j < int(cache[t].poly_ops.size()); ++j)
                    acc += cache[t].poly_ops[j].apply(y[m - j]);
                break;
            case OdeTerm::EntireLeft:
            case OdeTerm::PoleEntireLeft: {
                const auto& mats = term.kind == OdeTerm::EntireLeft ? cache[t].entire_mats : cache[t].combined;
                for (int j = 0; j <= m; ++j) {
                    Series contrib(N, d);
                    for (int k = term.entire_hbar; k <= N; ++k) contrib[k] = mats[j] * y[m - j][k - term.entire_hbar];
                    acc += contrib;
                }
                break;
            }
        }
    }
    return acc;
}

std::vector<Series> taylor_coeffs(const OdeSystem& ode, Cx z0, const Series& y0, int K) {
    auto cache = make_cache(ode, z0, K, true);
    std::vector<Series> y{y0};
    y.reserve(K + 1);
    for (int m = 0; m < K; ++m) y.push_back(Cx(1.0 / (m + 1)) * rhs_order(ode, cache, y, m));
    return y;
}

}  // namespace

Series transport_state(const OdeSystem& ode, const PathInC& path, const Series& y0, double tol) {
    auto poles = ode.poles();
    path.validate(poles);
    double total = 0;
    for (size_t k = 0; k + 1 < path.waypoints.size(); ++k) total += std::abs(path.waypoints[k + 1] - path.waypoints[k]);
    if (total == 0) return y0;

    const int K = 18;
    Series y = y0;
    for (size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
        Cx a = path.waypoints[seg], b = path.waypoints[seg + 1];
        double len = std::abs(b - a);
        if (len == 0) continue;
        Cx dir = (b - a) / len;
        double done = 0, h_prev = len;
        while (done < len * (1 - 1e-14)) {
            Cx z = a + done * dir;
            double clearance = 1e30;
            for (Cx p : poles) clearance = std::min(clearance, std::abs(z - p));
            auto coeffs = taylor_coeffs(ode, z, y, K);
            double h = std::min({len - done, 0.45 * clearance, 1.7 * h_prev, 5.0});
            double ynorm = std::max(1.0, y.norm());
            while (true) {
                double est = (coeffs[K].norm() * std::pow(h, K) + coeffs[K - 1].norm() * std::pow(h, K - 1)) * (K + 2);
                double loctol = tol * ynorm * std::max(h / total, 1e-4);
                if (est < loctol || h < 1e-13 * std::max(total, 1.0)) break;
                h *= 0.6;
            }
            if (h < 1e-13 * std::max(total, 1.0)) throw Error("ToleranceNotMet", "transport step underflow");
            Cx zeta = h * dir;
            Series val = coeffs[K];
            for (int m = K - 1; m >= 0; --m) val = zeta * val + coeffs[m];
            y = val;
            done += h;
            h_prev = h;
        }
    }
    return y;
}

Series transport(const OdeSystem& ode, const PathInC& path, double tol) {
    return transport_state(ode, path, Series::identity(ode.order, ode.dim), tol);
}

namespace {

// solve (c - ad(M0))(X) = rhs through the eigenbasis of M0
struct SylvesterSolver {
    bool trivial;
    Mat p, pinv;
    Vec d;
    explicit SylvesterSolver(const Mat& m0) {
        trivial = mat_norm(m0) < 1e-14;
        if (!trivial) {
            Eigen::ComplexEigenSolver<Mat> es(m0);
            p = es.eigenvectors();
            pinv = p.partialPivLu().solve(Mat::Identity(m0.rows(), m0.cols()));
            d = es.eigenvalues();
        }
    }
    Mat solve(Cx c, const Mat& rhs) const {
        if (trivial) return rhs / c;
        Mat t = pinv * rhs * p;
        for (int a = 0; a < t.rows(); ++a)
            for (int b = 0; b < t.cols(); ++b) {
                Cx den = c - d(a) + d(b);
                if (std::abs(den) < 0.25) throw Error("Resonant", "integer-resonant exponents; reduce |hbar|");
                t(a, b) /= den;
            }
        return p * t * pinv;
    }
};

}  // namespace

FrobeniusSolution::FrobeniusSolution(const OdeSystem& regular, Cx p, const Series& ml, const Series& h0, int nterms)
    : p_(p) {
    for (const auto& t : regular.terms)
        if ((t.kind == OdeTerm::PoleOp || t.kind == OdeTerm::PoleEntireLeft) && std::abs(t.pole - p) < 1e-12)
            throw Error("NotRegular", "regular part of the equation has a pole at the expansion point");
    int N = h0.order(), d = h0.dim();
    SylvesterSolver syl(ml[0]);
    auto cache = make_cache(regular, p, nterms, false);

    h_.push_back(h0);
    for (int m = 0; m < nterms; ++m) {
        Series rhs = rhs_order(regular, cache, h_, m);
        Series next(N, d);
        for (int k = 0; k <= N; ++k) {
            Mat c = rhs[k];
            for (int j = 1; j <= k; ++j) c += ml[j] * next[k - j] - next[k - j] * ml[j];
            next[k] = syl.solve(Cx(m + 1), c);
        }
        h_.push_back(std::move(next));
    }
}

Series FrobeniusSolution::eval(Cx z) const {
    Cx zeta = z - p_;
    Series acc = h_.back();
    for (int m = int(h_.size()) - 2; m >= 0; --m) acc = zeta * acc + h_[m];
    return acc;
}

double FrobeniusSolution::tail_estimate(Cx z) const {
    Cx zeta = z - p_;
    int m = int(h_.size()) - 1;
    return h_[m].norm() * std::pow(std::abs(zeta), m) + h_[m - 1].norm() * std::pow(std::abs(zeta), m - 1);
}

std::function<std::vector<Mat>(Cx, int)> conj_orbit(const Mat& p, const Mat& x) {
    return [p, x](Cx z0, int K) {
        Mat e = expm(z0 * p), einv = expm(-z0 * p);
        Mat g = e * x * einv;
        std::vector<Mat> out{g};
        for (int m = 1; m <= K; ++m) {
            g = (p * g - g * p) / double(m);
            out.push_back(g);
        }
        return out;
    };
}

std::function<std::vector<Mat>(Cx, int)> conj_phi1(const Mat& p, const Mat& x) {
    return [p, x](Cx z0, int K) {
        // f(z) = (e^{z ad P}(X) - X)/z
        std::vector<Mat> g{expm(z0 * p) * x * expm(-z0 * p)};
        for (int m = 1; m <= K + 1; ++m) g.push_back((p * g.back() - g.back() * p) / double(m));
        std::vector<Mat> out;
        if (std::abs(z0) < 1e-12) {
            // (e^{zeta ad P}(X) - X)/zeta has coefficients (ad P)^{m+1}(X)/(m+1)!
            for (int m = 0; m <= K; ++m) out.push_back(g[m + 1]);
        } else {
            // divide (g(zeta) - X) by (z0 + zeta) as power series
            std::vector<Mat> numer = g;
            numer[0] -= x;
            Cx inv = Cx(1) / z0;
            std::vector<Cx> dinv{inv};
            for (int m = 1; m <= K; ++m) dinv.push_back(-dinv.back() * inv);
            for (int m = 0; m <= K; ++m) {
                Mat acc = Mat::Zero(x.rows(), x.cols());
                for (int j = 0; j <= m; ++j) acc += dinv[j] * numer[m - j];
                out.push_back(acc);
            }
        }
        return out;
    };
}

std::function<std::vector<Mat>(Cx, int)> poly_conj_orbit(const Mat& m1, const Mat& m2, const Mat& x) {
    return [m1, m2, x](Cx z0, int K) {
        Mat mz = z0 * m1 + z0 * z0 * m2;
        Mat g = expm(-mz) * x * expm(mz);
        // dg/dz = [-(m1 + 2 z m2), g]
        Mat lam0 = m1 + 2.0 * z0 * m2, lam1 = 2.0 * m2;
        std::vector<Mat> out{g};
        for (int m = 0; m < K; ++m) {
            Mat acc = -(lam0 * out[m] - out[m] * lam0);
            if (m >= 1) acc -= lam1 * out[m - 1] - out[m - 1] * lam1;
            out.push_back(acc / double(m + 1));
        }
        return out;
    };
}

std::function<std::vector<Mat>(Cx, int)> shifted_quotient(std::function<std::vector<Mat>(Cx, int)> g, Mat g0) {
    return [g, g0](Cx z0, int K) {
        std::vector<Mat> out;
        if (std::abs(z0) < 1e-12) {
            auto v = g(z0, K + 1);
            for (int m = 0; m <= K; ++m) out.push_back(v[m + 1]);
        } else {
            auto v = g(z0, K);
            v[0] -= g0;
            Cx inv = Cx(1) / z0;
            std::vector<Cx> dinv{inv};
            for (int m = 1; m <= K; ++m) dinv.push_back(-dinv.back() * inv);
            for (int m = 0; m <= K; ++m) {
                Mat acc = Mat::Zero(g0.rows(), g0.cols());
                for (int j = 0; j <= m; ++j) acc += dinv[j] * v[m - j];
                out.push_back(acc);
            }
        }
        return out;
    };
}

// ---------------------------------------------------------------- Appendix A

namespace {
// 16-point Gauss-Legendre rule on [-1, 1]
const double kGlx[16] = {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
                         -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
                         0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                         0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
const double kGlw[16] = {0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
                         0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
                         0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                         0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

Mat gl_panel(const std::function<Mat(double)>& f, double a, double b) {
    Mat acc;
    for (int i = 0; i < 16; ++i) {
        double s = 0.5 * (a + b) + 0.5 * (b - a) * kGlx[i];
        Mat v = f(s);
        if (acc.size() == 0) acc = Mat::Zero(v.rows(), v.cols());
        acc += kGlw[i] * v;
    }
    return 0.5 * (b - a) * acc;
}
}  // namespace

Mat laplace_solve(double lambda, const std::function<Mat(Cx)>& k, double R, int sign, Cx z, double tol, double theta) {
    if (theta < 0) {
        if (lambda > 0) theta = kPi / 4;
        else if (lambda < 0) theta = 3 * kPi / 4;
        else theta = kPi / 2;
    }
    if (lambda == 0) {
        Mat far1 = k(z + Cx(sign) * kI * (R + 1e3)), far2 = k(z + Cx(sign) * kI * (R + 4e3));
        if (mat_norm(far2) > 1e-10 && mat_norm(far2) > 0.6 * mat_norm(far1))
            throw Error("NoSolution", "k has a surviving constant term while lambda = 0");
    }
    if (lambda * std::cos(theta) < 0) throw Error("DivergentTail", "contour angle incompatible with the sign of lambda");

    Cx corner = Cx(sign) * kI * R;
    Cx raydir = std::polar(1.0, sign * theta);
    auto tfun = [&](double s) { return s <= R ? Cx(sign) * kI * s : corner + (s - R) * raydir; };
    auto tder = [&](double s) { return s <= R ? Cx(sign) * kI : raydir; };
    auto f = [&](double s) -> Mat {
        Cx t = tfun(s);
        return std::exp(-lambda * t) * (k(z + t) / (z + t)) * tder(s);
    };

    Mat acc;
    double s0 = 0;
    double panel = std::max(std::min(1.0, 0.5 / std::max(std::abs(lambda), 0.5)), 0.05);
    int panels = 0;
    while (true) {
        double s1 = s0 + panel;
        if (s0 < R && s1 > R) s1 = R;  // keep the contour corner on a panel boundary
        Mat v = gl_panel(f, s0, s1);
        Mat v2 = gl_panel(f, s0, 0.5 * (s0 + s1)) + gl_panel(f, 0.5 * (s0 + s1), s1);
        if (mat_norm(v - v2) > 0.01 * tol) {
            panel *= 0.5;
            if (panel < 1e-7) throw Error("ToleranceNotMet", "laplace quadrature panel underflow");
            continue;
        }
        if (acc.size() == 0) acc = Mat::Zero(v2.rows(), v2.cols());
        acc += v2;
        s0 = s1;
        // with exponential damping panels stay moderate; algebraic decay needs
        // geometrically growing panels to reach the tail tolerance
        panel = lambda == 0 ? panel * 2.0 : std::min(panel * 1.6, 4.0);
        ++panels;
        if (s0 > R) {
            double fn = mat_norm(f(s0));
            double decay = std::abs(lambda) * std::cos(theta);
            double tail = decay > 1e-12 ? fn / decay : fn * s0;
            if (tail < 0.3 * tol && s0 > R + 2) break;
        }
        if (panels > 4000) throw Error("DivergentTail", "contour integral does not meet the tail tolerance");
    }
    return -acc;  // the contour runs from infinity to 0
}

std::vector<Mat> asymptotic_tail(double lambda, const std::vector<Mat>& kc, int nterms) {
    int d = int(kc[0].rows());
    std::vector<Mat> out;
    if (lambda == 0) {
        if (mat_norm(kc[0]) > 1e-13) throw Error("InvalidCase", "lambda = 0 requires k0 = 0");
        for (int n = 1; n <= nterms; ++n) {
            Mat kn = n < int(kc.size()) ? kc[n] : Mat::Zero(d, d);
            out.push_back(-kn / double(n));
        }
        return out;
    }
    for (int n = 1; n <= nterms; ++n) {
        Mat acc = Mat::Zero(d, d);
        double fact_p = 1.0;
        for (int p = 0; p < n; ++p) {
            if (p > 0) fact_p *= p;
            if (p < int(kc.size())) acc += kc[p] / fact_p * std::pow(-lambda, double(p - n));
        }
        double fact_n1 = 1.0;
        for (int j = 2; j < n; ++j) fact_n1 *= j;
        out.push_back(fact_n1 * acc);
    }
    return out;
}

Mat lambda_tail_eval(double lambda, const std::vector<Mat>& kc, Cx z, int nterms) {
    int d = int(kc[0].rows());
    Mat acc = Mat::Zero(d, d);
    for (int n = 1; n <= nterms; ++n) {
        Mat der = Mat::Zero(d, d);
        for (int m = 0; m < int(kc.size()); ++m) {
            double coef = 1;
            for (int j = 1; j < n; ++j) coef *= -(m + j);
            der += kc[m] * coef * std::pow(z, -double(m + n));
        }
        acc -= der / std::pow(lambda, double(n));
    }
    return acc;
}

// ------------------------------------------------------- anchored solutions

AnchoredSolution::AnchoredSolution(const OdeSystem& ode, const Mat& w, Cx direction, Params params)
    : ode_(ode), w_(w), dir_(direction / std::abs(direction)), params_(params) {
    int N = ode.order, d = ode.dim;
    for (const auto& t : ode_.terms) {
        if (t.kind == OdeTerm::EntireLeft || t.kind == OdeTerm::PoleEntireLeft)
            throw Error("Unsupported", "anchored solver needs rational terms");
        if (t.kind == OdeTerm::PoleOp && t.op.min_hbar_weight() < 1)
            throw Error("Unsupported", "anchored solver needs hbar-positive pole terms");
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            if (a != b && std::abs(w_(a, b)) > 1e-13) throw Error("Unsupported", "irregular part must be diagonal");

    int P = params_.expansion_terms;
    coeffs_.assign(P + 2, Series(N, d));
    coeffs_[0] = Series::identity(N, d);

    // S_p = sum_{m=1..p} (sum over pole terms p_t^{m-1} Op_t)(C_{p-m})
    auto source_at = [&](int p) -> Series {
        Series acc(N, d);
        for (const auto& t : ode_.terms) {
            if (t.kind != OdeTerm::PoleOp) continue;
            Cx pw = 1;
            for (int m = 1; m <= p; ++m) {
                acc += t.op.scaled(pw).apply(coeffs_[p - m]);
                pw *= t.pole;
            }
        }
        return acc;
    };

    for (int p = 1; p <= P + 1; ++p) {
        Series sp = source_at(p);
        Series rhs = Cx(-(p - 1.0)) * coeffs_[p - 1] - sp;
        double magnitude = std::max({1.0, rhs.norm(), coeffs_[p - 1].norm() * p});
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                Cx lam = w_(a, a) - w_(b, b);
                if (std::abs(lam) < 1e-9) continue;
                for (int k = 0; k <= N; ++k) coeffs_[p][k](a, b) = rhs[k](a, b) / lam;
            }
        for (int k = 0; k <= N; ++k)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (std::abs(w_(a, a) - w_(b, b)) < 1e-9 && std::abs(rhs[k](a, b)) > 1e-8 * magnitude)
                        throw Error("ResonantWeight", "zero-eigenvalue block carries a nonvanishing source");
        if (p <= P) {
            // kernel entries come from the next order; fill hbar-order by hbar-order
            for (int k = 0; k <= N; ++k) {
                Series sp1 = source_at(p + 1);  // order k of sp1 sees C_p only below order k
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        if (std::abs(w_(a, a) - w_(b, b)) < 1e-9) coeffs_[p][k](a, b) = -sp1[k](a, b) / double(p);
            }
        }
    }
    coeffs_.resize(P + 1);

    anchor_point_ = params_.anchor_radius * dir_;
    Series acc = coeffs_.back();
    for (int p = int(coeffs_.size()) - 2; p >= 0; --p) acc = (Cx(1) / anchor_point_) * acc + coeffs_[p];
    anchor_value_ = acc;
    anchor_err_ = coeffs_.back().norm() * std::pow(params_.anchor_radius, -double(P));
}

Series AnchoredSolution::eval_expansion(Cx z) const {
    Series acc = coeffs_.back();
    for (int p = int(coeffs_.size()) - 2; p >= 0; --p) acc = (Cx(1) / z) * acc + coeffs_[p];
    return acc;
}

Series AnchoredSolution::eval(Cx z) const {
    if (std::abs(z - anchor_point_) < 1e-12) return anchor_value_;
    PathInC path;
    path.waypoints = {anchor_point_, z};
    path.clearance = 1e-6;
    return transport_state(ode_, path, anchor_value_, params_.tol);
}

}  // namespace casmon
