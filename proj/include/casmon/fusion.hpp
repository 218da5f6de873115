#ifndef CASMON_FUSION_HPP
#define CASMON_FUSION_HPP

#include "casmon/connections.hpp"

namespace casmon {

// Everything here runs on an n-leg tensor module, with the acting subalgebra
// restricted to a subdiagram block when the recursion over Levi subalgebras
// needs the smaller system. mu is a Cartan point in complexified coroot
// coordinates (typically i times a chamber point).
struct FusionContext {
    const Representation* rep = nullptr;
    const Tensors* tensors = nullptr;
    Scale scale;
    Subdiag block = 0;  // 0 means the full diagram
    Vec mu;

    Subdiag blk() const { return block ? block : (1u << rep->rs->rank()) - 1; }
    Mat mu_leg(int leg) const { return rep->leg(leg, rep->cartan_action_factor_cx(leg, mu)); }
    Mat mu_total() const { return rep->cartan_action_cx(mu); }
};

// ---- the joint-system solutions ----

// zeta-form solution of the coupled system: dH/dzeta = [sum_k zeta_k mu^(k), H]
// + nu (Omega H - H Omega^h)/zeta, normalized to 1 at infinity in the half-plane
// of `direction`. Returns H(zeta).
Series fusion_h(const FusionContext& fc, const Vec& zeta_cfg, Cx zeta, Cx direction, AnchorParams ap = AnchorParams{});

// two-leg solution in the z variable: J = H(z) (sigma z)^{nu Omega^h} with
// H -> 1 as z -> sigma * infinity along the real axis
struct JSolution {
    Series h;        // H(z)
    Series value;    // J(z)
    double anchor_error;
};
JSolution fusion_j2(const FusionContext& fc, Cx z, int sign, AnchorParams ap = AnchorParams{});

// n = 3 fusion operator at a real configuration z1 > z2 > z3 via the zeta form
Series fusion_j3(const FusionContext& fc, const Vec& zcfg, AnchorParams ap = AnchorParams{});

// five-point finite-difference residual of d/dz at z against the given ODE
double ode_residual(const OdeSystem& ode, const std::function<Series(Cx)>& sol, Cx z, double delta = 1e-3);

// ---- normalized solutions at z = 0 and the differential twist ----

// H_0(z) with H_0(0) = 1 from the regular-singular recursion
Series upsilon0_h(const FusionContext& fc, Cx z, int fro_terms = 40);
// Upsilon_0^{-1}[y] = z^{-nu Om} H_0^{-1} e^{-z mu^(1)} y e^{z mu^(1)}
Series upsilon0_apply_inverse(const FusionContext& fc, Cx z, Cx logz, const Series& y, int fro_terms = 40);

struct TwistResult {
    Series value;             // F(mu) = Upsilon_0^{-1} J^(2), the J of the twist pair
    double z_independence;    // disagreement between the probe points
    double anchor_error;
};
TwistResult differential_twist(const FusionContext& fc, int sign, const std::vector<double>& z_probes = {1.0, 2.0});

// twist action (1xF)(idxDelta F) Phi (Delta x id F)^{-1} (F x 1)^{-1}; the
// pieces are supplied as matrices on the triple tensor product
Series twist_action(const Series& phi, const Series& f23_of, const Series& f_12_3, const Series& f_1_23, const Series& f12_of);

// ---- asymptotics in a simple-root direction ----

struct LeviData {
    int vertex = 0;
    Subdiag bar = 0;          // remaining vertices (possibly disconnected)
    RVec coweight;            // fundamental coweight of `vertex` in coroot coords
    Vec mu_bar;               // iota(pi(mu)): alpha_vertex component removed
    std::vector<std::pair<int, Cx>> w_alpha;  // root index in Phi+ \ Phi_bar -> w_alpha
    double r_mu() const {
        double r = 0;
        for (auto& [_, w] : w_alpha) r = std::max(r, std::abs(w));
        return r;
    }
};
LeviData levi_split(const FusionContext& fc, int vertex, const Vec& mu_ambient);

// static H_infty(w) with H(infty) = 1 (regular singular at infinity);
// value = H * w^{(nu/2)(K - olK)} with the given log determination
struct UpsilonInf {
    Series h;
    Series value;
};
UpsilonInf upsilon_inf(const FusionContext& fc, const LeviData& lv, Cx w, Cx logw, int fro_terms = 40);

// dynamical variant: H^pm_infty(w, mu_bar, z) anchored in the w half-plane
Series upsilon_inf_dyn_h(const FusionContext& fc, const LeviData& lv, Cx z, Cx w, int sign, AnchorParams ap = AnchorParams{});

// ---- centraliser constant and relative twists ----

struct CentraliserResult {
    Series c_route_a;         // Delta(Ups_inf)^{-1} J_g Ups_inf^x2 J_olg^{-1}
    Series c_route_b;         // Psi_0^{-1} Psi_inf^pm of the blown-up connection
    double route_disagreement;
    Series relative_twist;    // F'_{(B;alpha_i)} = (C)^{-1} in the twist-axiom convention
};
// `va`, `vb` are the two factor modules (possibly grouped legs collapsed via
// as_single_leg). mu must be regular for the block with alpha_vertex(mu) != 0.
CentraliserResult centraliser_constant(const Representation& va, const Representation& vb, const Scale& scale,
                                       Subdiag block, const Vec& mu, int vertex, int sign,
                                       AnchorParams ap = AnchorParams{}, bool both_routes = true);

// full welding report: twist equations, DCP compatibility, factorized twist
// kills the associator, coproduct identity, braid relations with associator
// conjugation, plus the rank-one squares data
VerificationReport assemble_qcqtqba(const Representation& single, const Scale& scale, const Vec& mu,
                                    double tol_major = 1e-6, double tol_exact = 1e-10);

// conjugated constant twist F_{(B;alpha_i)} from F' and the adapted family value x_B(coweight)
Series dress_relative_twist(const FusionContext& fc, int vertex, double xb_coweight, const Series& f_prime);

// ---- bracketing solutions on three points ----

// Upsilon_b at the configuration z1 > z2 > z3 fixed by u-coordinates; bracket
// is {0} for ((..).) and {1} for (.(..)) on three letters
struct BracketSolution {
    Series value;        // Upsilon_b(zcfg) as a matrix (conjugated form)
    Series tilde;        // gauged value: e^{-M} Upsilon_b e^{M}
    Mat m_at_one;        // M(zcfg) = sum_i z_i mu^{(i)}
    Vec zcfg;            // the common evaluation configuration (sum = 0)
    double err_estimate = 0;
};
BracketSolution bracketing_upsilon(const FusionContext& fc, int bracket, const Vec& ustar, double tol);
// Upsilon_b^{-1}[Y] as an operator: ratios of brackets and regularized limits
Series bracket_rlim(const BracketSolution& b, const Series& y);

}  // namespace casmon

#endif
