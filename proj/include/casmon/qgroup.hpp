#ifndef CASMON_QGROUP_HPP
#define CASMON_QGROUP_HPP

#include "casmon/connections.hpp"

namespace casmon {

// Quantum deformation of a built-in module: generator matrices with entries
// in the hbar ring (q = e^hbar), the classical shadow at hbar = 0, and the
// per-factor data needed to build coproducts and leg operators.
class QRepresentation {
  public:
    std::shared_ptr<const RootSystem> rs;
    Scale scale;
    int dim = 0;
    Representation classical;
    std::vector<Series> E, F;  // per vertex, total action
    std::vector<Mat> H;        // integer diagonal, undeformed
    std::vector<int> factor_dims;
    std::vector<std::vector<Series>> fE, fF;  // per factor
    std::vector<std::vector<Mat>> fH;

    int legs() const { return int(factor_dims.size()); }
    Series leg(int i, const Series& m) const;
    Series k_power(int vertex, double exponent) const;            // q_i^{exponent * H_i}
    Series k_power_factor(int fct, int vertex, double exponent) const;
    double qi_log(int vertex) const;                              // d_i, so q_i = e^{d_i hbar}

    double relation_residual() const;  // quantum Chevalley + q-Serre, worst hbar coefficient
};

QRepresentation q_deform(const Representation& rep, const Scale& scale);
QRepresentation q_tensor(const QRepresentation& a, const QRepresentation& b);

// Lusztig operator: v of weight l -> sum over a - b + c = -l(coroot_i) of
// (-1)^b q_i^{b - ac} E^{(a)} F^{(b)} E^{(c)} v; variant C multiplies by q_i^{H_i^2/4}.
Series quantum_weyl(const QRepresentation& qr, int vertex, bool variant_c);

// sl2-block R-matrix on a two-factor deformation:
//   R_i = q_i^{H_i x H_i / 2} sum_n q_i^{n(n-1)/2} (q_i - q_i^{-1})^n / [n]_i! E_i^n x F_i^n
Series sl2_r_matrix(const QRepresentation& qr, int vertex);
Series sl2_r_bar(const QRepresentation& qr, int vertex);  // without the Cartan prefactor

// Correction factor in the coproduct identity
//   Delta(S^kappa) = X * (S^kappa x S^kappa),
// the flip of the quasi-R part written for this coproduct; equals
// Ad(q^{-H x H/2}) of flip(q^{-H x H/2} R).
Series coproduct_twist_factor(const QRepresentation& qr, int vertex);

// squares lemma data: exp(pi i H_i) q^{kappa_i} and exp(pi i H_i) q^{C_i} as
// fixed-hbar matrices (isotypic projectors from the quantum Casimir spectrum)
Mat squares_rhs(const QRepresentation& qr, int vertex, bool variant_c, Cx hbar);

// eigenvalue multiset distance by exact minimal matching (small dimensions)
double spectrum_distance(const Mat& a, const Mat& b);

struct EquivalenceOptions {
    int order = 3;                 // series comparison order
    std::vector<Cx> hbar_samples = {Cx(0.05, 0), Cx(0.1, 0), Cx(0.1, 0.05)};
    bool variant_c = true;
    double tol_series = 1e-5;
    double tol_numeric = 1e-6;
};

// Monodromy comparator: conjugation-invariant data of braid words on the connection
// side (monodromy of the Casimir connection at hbar = pi i nu) against the
// quantum Weyl action at q = e^hbar.
VerificationReport monodromy_equivalence(const Representation& rep, const std::vector<BraidWord>& words,
                                         const EquivalenceOptions& opt);

}  // namespace casmon

#endif
