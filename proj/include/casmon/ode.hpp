#ifndef CASMON_ODE_HPP
#define CASMON_ODE_HPP

#include "casmon/series.hpp"

#include <functional>

namespace casmon {

// Linear operator on matrix states: X -> sum_j L_j X R_j. Left or right factor
// may be absent. Coefficients live in the hbar-series ring, which is how the
// formal parameter enters the equations.
struct LinOp {
    struct Part {
        bool has_l = false, has_r = false;
        Series l, r;
    };
    std::vector<Part> parts;

    static LinOp left(const Series& m);
    static LinOp right(const Series& m);
    static LinOp ad(const Series& m);  // left - right
    static LinOp sandwich(const Series& l, const Series& r);
    LinOp& operator+=(const LinOp& o);
    LinOp scaled(Cx s) const;
    bool empty() const { return parts.empty(); }
    Series apply(const Series& x) const;
    // order-n coefficient of apply, using only orders < n of x (for triangular solves)
    Mat apply_order(const std::vector<Mat>& x_coeffs, int n, bool strict_lower) const;
    double min_hbar_weight() const;  // smallest k with a nonzero hbar^k coefficient
};

// dY/dz = sum of terms applied to Y. Terms are rational (constant operator
// over a simple pole or constant in z) or entire left multiplications given
// through a local Taylor provider.
struct OdeTerm {
    enum Kind { PoleOp, ConstOp, PolyOp, EntireLeft, PoleEntireLeft } kind = ConstOp;
    Cx pole = 0;
    LinOp op;                    // PoleOp / ConstOp
    std::vector<LinOp> powers;   // PolyOp: sum_k z^k powers[k]
    std::function<std::vector<Mat>(Cx, int)> entire;  // Taylor coefficients of m(z) at z0
    int entire_hbar = 0;                              // hbar weight multiplying the entire factor

    static OdeTerm pole_op(Cx p, LinOp o);
    static OdeTerm const_op(LinOp o);
    static OdeTerm poly_op(std::vector<LinOp> powers);
    static OdeTerm entire_left(std::function<std::vector<Mat>(Cx, int)> f, int hbar_weight);
    static OdeTerm pole_entire_left(Cx p, std::function<std::vector<Mat>(Cx, int)> f, int hbar_weight);
};

// Taylor providers for conjugation orbits, the entire coefficients appearing
// after gauging away a rank-one irregular term.
std::function<std::vector<Mat>(Cx, int)> conj_orbit(const Mat& p, const Mat& x);   // e^{zP} X e^{-zP}
std::function<std::vector<Mat>(Cx, int)> conj_phi1(const Mat& p, const Mat& x);    // ((e^{z ad P} - 1)/z)(X)
// orbit under a quadratic Cartan path: e^{-M(z)} X e^{M(z)}, M = m1 z + m2 z^2
std::function<std::vector<Mat>(Cx, int)> poly_conj_orbit(const Mat& m1, const Mat& m2, const Mat& x);
// (g(z) - g0)/z for a Taylor provider g
std::function<std::vector<Mat>(Cx, int)> shifted_quotient(std::function<std::vector<Mat>(Cx, int)> g, Mat g0);

struct OdeSystem {
    int dim = 0;
    int order = 0;  // hbar truncation order of the ring
    std::vector<OdeTerm> terms;

    std::vector<Cx> poles() const;
};

// A path is a polyline; arcs are approximated by chords, which transport
// treats exactly through homotopy invariance.
struct PathInC {
    std::vector<Cx> waypoints;
    double clearance = 1e-3;
    void validate(const std::vector<Cx>& poles) const;  // PoleTooClose on violation
};
std::vector<Cx> circle_path(Cx center, double radius, int segments, Cx start_angle_dir = Cx(1, 0));

// Parallel transport of the fundamental state along the path: returns T with
// Y(end) = T (starting from Y(start) = id), by adaptive Taylor stepping.
Series transport(const OdeSystem& ode, const PathInC& path, double tol);
// transport applied to a given initial state
Series transport_state(const OdeSystem& ode, const PathInC& path, const Series& y0, double tol);

// Normalized solution H at a regular singular point p of the H-equation
//   dH/dz = [ML, H]/(z - p) + (regular terms)(H),  H(p) = H0.
// `regular` must be analytic at p. In fixed-hbar mode the non-resonance
// condition (no eigenvalue gap of ML equal to a positive integer) is required.
class FrobeniusSolution {
  public:
    FrobeniusSolution(const OdeSystem& regular, Cx p, const Series& ml, const Series& h0, int nterms);
    Series eval(Cx z) const;
    double tail_estimate(Cx z) const;
    Cx base() const { return p_; }

  private:
    Cx p_;
    std::vector<Series> h_;
};

// --- Appendix-A machinery: dh/dz = lambda h + k(z)/z on half-planes ---

// Laplace-contour solution evaluated at z. `k` must be holomorphic on the
// half-plane |z| > R (sign = +1 upper, -1 lower) with an asymptotic expansion;
// theta < 0 picks the case table's default contour angle.
Mat laplace_solve(double lambda, const std::function<Mat(Cx)>& k, double R, int sign, Cx z, double tol,
                  double theta = -1.0);

// Coefficients of the z -> infinity expansion of h given those of k.
// lambda != 0 uses the factorial double sum; lambda == 0 requires k0 = 0.
std::vector<Mat> asymptotic_tail(double lambda, const std::vector<Mat>& kcoeffs, int nterms);

// lambda -> infinity expansion evaluated at z: h ~ -sum (k(z)/z)^{(n-1)} lambda^{-n},
// with k given by its z-expansion coefficients.
Mat lambda_tail_eval(double lambda, const std::vector<Mat>& kcoeffs, Cx z, int nterms);

// --- anchored solutions at an irregular singularity (rank one) ---

// Equation dY/dz = ad(W)(Y) + sum_j (1/(z - p_j)) Op_j(Y) with W diagonal
// (order-0, hbar-free) and every Op_j of positive hbar weight. The normalized
// solution tends to 1 in interior sectors of the chosen half-plane.
struct AnchorParams {
    double anchor_radius = 25.0;
    int expansion_terms = 14;
    double tol = 1e-12;
};

class AnchoredSolution {
  public:
    using Params = AnchorParams;
    AnchoredSolution(const OdeSystem& ode, const Mat& w, Cx direction, Params params = Params{});

    Series eval(Cx z) const;                 // transport from the anchor to z
    const std::vector<Series>& expansion() const { return coeffs_; }
    Series eval_expansion(Cx z) const;       // plain expansion sum (valid for large |z|)
    double anchor_error() const { return anchor_err_; }

  private:
    OdeSystem ode_;
    Mat w_;
    Cx dir_;
    Params params_;
    std::vector<Series> coeffs_;  // C_p, p = 0..P
    Series anchor_value_;
    Cx anchor_point_;
    double anchor_err_ = 0;
};

}  // namespace casmon

#endif
