#ifndef CASMON_CONNECTIONS_HPP
#define CASMON_CONNECTIONS_HPP

#include "casmon/diagrams.hpp"
#include "casmon/ode.hpp"
#include "casmon/report.hpp"

namespace casmon {

enum class ConnKind { KZ, CasimirK, CasimirC, DynKZ };

// A flat connection d - A with A a sum of logarithmic terms op * d(l)/l over
// linear functionals of the coordinates, plus the exact coupling term
// d(sum_i z_i ad(mu^(i))) when present. Coordinates are (z_1..z_nz, u_1..u_rank)
// with u the coroot coordinates on the Cartan.
class ConnectionSpec {
  public:
    struct Log {
        RVec grad;  // l(y) = grad . y
        LinOp op;
    };

    ConnKind kind = ConnKind::CasimirK;
    int nz = 0;
    int rank = 0;
    bool coupled = false;
    Scale scale;
    int dim = 0;
    std::vector<Log> logs;
    const Representation* rep = nullptr;

    int nvars() const { return nz + rank; }
    Cx form_value(const Log& l, const Vec& y) const;
    LinOp coefficient(int c, const Vec& y) const;        // connection coefficient A_c(y)
    OdeSystem segment(const Vec& a, const Vec& b) const;  // restriction to y(t) = a + t(b-a)
    Series transport_polyline(const std::vector<Vec>& pts, double tol) const;
};

// kind = KZ / DynKZ: n-point system on rep legs (legs of `rep` are the points);
// Casimir variants: rank-many coordinates only.
ConnectionSpec build_connection(ConnKind kind, const Representation& rep, const Tensors& tensors, const Scale& scale);

// curvature at random regular points plus the structured commutator identities
// behind the joint flatness proof
VerificationReport verify_flatness(const ConnectionSpec& conn, const Tensors& tensors, int samples, unsigned seed,
                                   double tol, double tol_identities);

// ---- KZ associator ----

// Regularized connection constant between the normalized solutions at z = 0
// and z = 1 of dG/dz = nu (Om12/z + Om23/(z-1)) G on V1 x V2 x V3.
Series kz_associator(const Representation& v1, const Representation& v2, const Representation& v3, const Scale& scale,
                     double x_probe = 0.5, int terms = 64, Subdiag block = 0);

// slot permutation: factor k of the tensor product moves to slot dest[k]
Mat slot_permutation(const std::vector<int>& dims, const std::vector<int>& dest);

// ---- DCP fundamental solutions and associators ----

struct DcpContext {
    std::shared_ptr<const RootSystem> rs;
    Diagram diagram = Diagram(1, {});
    NestedSetFamily fam;
    AdaptedFamily adapted;
    const Representation* rep = nullptr;
    const Tensors* tensors = nullptr;
    Scale scale;
    bool variant_c = false;
    std::vector<BlowupChart> charts;

    Mat residue(int pos_root) const;        // K_alpha or C_alpha
    Mat residue_sub(Subdiag b) const;       // K_B or C_B
};
DcpContext make_dcp(const Representation& rep, const Tensors& tensors, Scale scale, bool variant_c);

// Fundamental solution normalized at the corner of one blow-up chart,
// evaluated at the chart base point u_B = u0 and transported elsewhere.
class FundamentalSolution {
  public:
    FundamentalSolution(const DcpContext& ctx, int mns_index, double tol, double u0 = 0.5, int fro_terms = 70);

    const Series& at_base() const { return value_; }
    Vec base_point() const { return base_; }
    Series at(const Vec& y, double tol) const;  // straight-segment transport in the chamber
    // regularized corner limit with two-step Richardson extrapolation
    Series corner_limit(double s, double tol, double* err_estimate = nullptr) const;
    int mns_index() const { return mns_; }

  private:
    const DcpContext* ctx_;
    int mns_;
    double u0_;
    Vec base_;
    Series value_;
    OdeSystem diag_ode_;  // along u = t * u0 * ones
    Series normalization(double t) const;
};

// Phi_{GF} = Psi_G(y)^{-1} Psi_F(y), evaluated at F's base point by default.
Series dcp_associator(const DcpContext& ctx, const FundamentalSolution& g, const FundamentalSolution& f, double tol);

// ---- braid monodromy ----

struct BraidWord {
    std::vector<int> letters;  // 1-based vertex, negative for the inverse generator
};

class BraidMonodromy {
  public:
    BraidMonodromy(const DcpContext& ctx, int mns_index, double tol);
    Series generator(int vertex, int sign = +1) const;  // pi_F(S_vertex^{sign})
    Series word(const BraidWord& w) const;
    const FundamentalSolution& solution() const { return sol_; }

  private:
    const DcpContext* ctx_;
    FundamentalSolution sol_;
    double tol_;
    mutable std::map<int, Series> cache_;
};

}  // namespace casmon

#endif
