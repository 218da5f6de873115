#ifndef CASMON_LIEALG_HPP
#define CASMON_LIEALG_HPP

#include "casmon/core.hpp"

#include <map>
#include <memory>
#include <optional>

namespace casmon {

// Subdiagrams are vertex bitsets over the Dynkin diagram.
using Subdiag = unsigned;

inline int subdiag_size(Subdiag b) { return __builtin_popcount(b); }
inline bool subdiag_contains(Subdiag a, Subdiag b) { return (a & b) == b; }

// Root system from a Cartan matrix, normalized so short roots have (a,a)=2.
// Roots are stored as integer coefficient vectors over the simple roots;
// Cartan elements as coefficient vectors over the simple coroots.
class RootSystem {
  public:
    explicit RootSystem(const Eigen::MatrixXi& cartan);

    int rank() const { return rank_; }
    const Eigen::MatrixXi& cartan() const { return cartan_; }
    bool connected() const { return components_.size() == 1; }
    const std::vector<Subdiag>& components() const { return components_; }

    int num_positive() const { return int(pos_roots_.size()); }
    // coefficients of positive root r over simple roots
    const Eigen::VectorXi& pos_root(int r) const { return pos_roots_[r]; }
    double root_norm2(int r) const { return root_norm2_[r]; }           // (a, a)
    double simple_norm2(int i) const { return 2.0 * d_[i]; }            // (a_i, a_i)

    // a(t) for a = positive root r, t given in coroot coordinates
    double pairing(int r, const RVec& coroot_coords) const;
    int cartan_pairing(int r, int j) const;  // a_r(a_j^vee), an integer

    RVec fundamental_coweight(int i) const { return coweights_.col(i); }  // coroot coords
    double coroot_form(const RVec& u, const RVec& v) const;               // (.,.) on h
    double coweight_norm2(int i) const;
    const Eigen::MatrixXd& coroot_gram() const { return coroot_gram_; }

    // smallest subdiagram (as bitset of vertices) whose root space contains root r
    Subdiag root_support(int r) const { return support_[r]; }
    bool root_in(int r, Subdiag b) const { return subdiag_contains(b, support_[r]); }
    std::vector<int> positive_roots_of(Subdiag b) const;

    // coefficients c with alpha^vee_r = sum_i c_i alpha^vee_i (exact for crystallographic data)
    RVec coroot_of(int r) const;

  private:
    int rank_ = 0;
    Eigen::MatrixXi cartan_;
    std::vector<double> d_;  // symmetrizers, (a_i,a_i)/2, short = 1
    Eigen::MatrixXd gram_;   // (a_i, a_j) on h*
    std::vector<Eigen::VectorXi> pos_roots_;
    std::vector<double> root_norm2_;
    std::vector<Subdiag> support_;
    Eigen::MatrixXd coweights_;        // column i = fundamental coweight i in coroot coords
    Eigen::MatrixXd coroot_gram_;      // (a_i^vee, a_j^vee)
    std::vector<Subdiag> components_;
};

std::shared_ptr<const RootSystem> build_root_system(const Eigen::MatrixXi& cartan);

// Finite-dimensional module given by Chevalley generator matrices. Tensor
// products act through the iterated coproduct, so evaluating an expression in
// the generators on a tensor product is the coproduct action by construction.
class Representation {
  public:
    Representation() = default;

    std::shared_ptr<const RootSystem> rs;
    int dim = 0;
    std::vector<Mat> e, f, h;             // one per simple root
    std::vector<double> index;            // Dynkin index of each factor (0 for trivial)
    std::vector<int> factor_dims;         // tensor legs; single factor = {dim}
    std::vector<std::vector<Mat>> fe, ff, fh;  // per-factor generator matrices

    Eigen::MatrixXd weights;              // row b = (h_1,...,h_r) eigenvalues of basis vector b

    int legs() const { return int(factor_dims.size()); }
    Mat leg(int i, const Mat& m) const;   // 1 x ... x m x ... x 1 with m in slot i
    Mat cartan_action(const RVec& coroot_coords) const;           // rho(t), total
    Mat cartan_action_factor(int fct, const RVec& coords) const;
    Mat cartan_action_cx(const Vec& coroot_coords) const;         // complexified point
    Mat cartan_action_factor_cx(int fct, const Vec& coords) const;
    RVec mu_weights(const RVec& coroot_coords) const;             // diag of rho(t) per basis vector

    Mat tits_reflection(int i) const;     // exp(e_i) exp(-f_i) exp(e_i)
    Representation chevalley_twist() const;  // generators composed with e -> -f, f -> -e, h -> -h

    double relation_residual() const;     // max residual over Chevalley + Serre relations
};

Representation sl2_irrep(int m);                                   // dim m+1
Representation sln_defining(int n);                                // n in {2,3,4}
Representation trivial_rep(std::shared_ptr<const RootSystem> rs);  // counit slot
Representation as_single_leg(const Representation& rep);           // collapse tensor legs into one
Representation rep_from_file(const std::string& path);
Representation tensor(const std::vector<Representation>& reps);

// Root vector matrices normalized so (x_a, x_{-a}) = 1 under the form with
// short roots of square length 2. Built by a fixed bracket chain
// (lexicographically first decomposition), so signs are deterministic.
struct RootVectors {
    std::vector<Mat> xp, xm;                      // total matrices, indexed by positive root
    std::vector<std::vector<Mat>> fxp, fxm;       // per factor
};
RootVectors root_vectors(const Representation& rep);

enum class TensorKind { Omega, OmegaH, KAlpha, CAlpha, KB, RB, Lambda, Casimir };

// Invariant tensors bound to one representation (with its root vectors).
class Tensors {
  public:
    Tensors(const Representation& rep) : rep_(&rep), rv_(root_vectors(rep)) {}

    const Representation& rep() const { return *rep_; }
    const RootVectors& rv() const { return rv_; }

    Mat omega(int li, int lj, Subdiag b) const;     // Omega_B on legs (li, lj)
    Mat omega_h(int li, int lj, Subdiag b) const;
    Mat omega_full(Subdiag b) const;                // sum over ordered pairs i<j
    Mat omega_h_full(Subdiag b) const;
    Mat k_alpha(int r) const;                       // K_a in the whole rep (iterated coproduct)
    Mat k_alpha_leg(int li, int r) const;
    Mat c_alpha(int r) const;                       // K_a + (a,a)/4 h_a^2
    Mat k_sub(Subdiag b) const;                     // sum of K_a over positive roots of B
    Mat c_sub(Subdiag b) const;
    Mat r_matrix_classical(int li, int lj, Subdiag b) const;  // r_B legs
    Mat lambda(int vertex, int li, int lj) const;   // coweight^2 / norm tensor
    Mat casimir(Subdiag b) const;                   // full Casimir of g_B in the rep

  private:
    const Representation* rep_;
    RootVectors rv_;
};

Mat chevalley_theta_matrix(const Representation& rep);  // intertwiner V -> V twisting by Theta, if it exists

}  // namespace casmon

#endif
