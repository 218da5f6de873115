#ifndef CASMON_DIAGRAMS_HPP
#define CASMON_DIAGRAMS_HPP

#include "casmon/liealg.hpp"

#include <map>

namespace casmon {

// Undirected labelled graph on vertex set {0..n-1}; m_ij = 2 iff i,j orthogonal.
class Diagram {
  public:
    Diagram(int n, const std::vector<std::pair<int, int>>& edges, const std::map<std::pair<int, int>, int>& labels = {});
    static Diagram from_root_system(const RootSystem& rs);  // labels = order of s_i s_j
    static Diagram type_a(int vertices);

    int size() const { return n_; }
    Subdiag full() const { return (1u << n_) - 1; }
    bool edge(int i, int j) const { return adj_(i, j) != 0; }
    int label(int i, int j) const;
    bool connected(Subdiag b) const;
    bool orthogonal(Subdiag a, Subdiag b) const;
    bool compatible(Subdiag a, Subdiag b) const;
    std::vector<Subdiag> components(Subdiag b) const;
    std::vector<Subdiag> connected_subdiagrams() const;  // all nonempty connected vertex sets

  private:
    int n_;
    Eigen::MatrixXi adj_;
    std::map<std::pair<int, int>, int> labels_;
};

struct MaximalNestedSet {
    std::vector<Subdiag> elements;     // sorted by (popcount, value); contains the full diagram
    std::map<Subdiag, int> marked;     // B -> vertex index alpha^B_F
    bool contains(Subdiag b) const { return std::find(elements.begin(), elements.end(), b) != elements.end(); }
};

struct NestedSetFamily {
    std::vector<std::vector<Subdiag>> nested_sets;  // every nested set, sorted canonically
    std::vector<MaximalNestedSet> mns;
};

NestedSetFamily enumerate_nested_sets(const Diagram& d);

// Number of complete bracketings of n letters by direct recursion; the
// independent side of the type-A bijection check.
long count_bracketings(int letters);

struct MnsPairData {
    bool elementary = false;
    Subdiag supp = 0, zsupp = 0;
    std::vector<int> chain;  // indices into the MNS list: F = chain.front(), G = chain.back()
};
MnsPairData mns_pair_data(const Diagram& d, const NestedSetFamily& fam, int f_idx, int g_idx);

// Family B -> x_B in h* (coefficients over simple roots) adapted to all MNS.
class AdaptedFamily {
  public:
    AdaptedFamily() = default;
    AdaptedFamily(const RootSystem& rs, const Diagram& d, std::map<Subdiag, RVec> x);
    static AdaptedFamily standard(const RootSystem& rs, const Diagram& d);  // x_B = sum of positive roots of B

    const RVec& x(Subdiag b) const;
    double eval(Subdiag b, const RVec& coroot_pt) const;   // x_B(t)
    Cx eval(Subdiag b, const Vec& coroot_pt) const;

  private:
    const RootSystem* rs_ = nullptr;
    std::map<Subdiag, RVec> x_;
};

// Verifies the basis condition for every (F, B); throws BasisDegenerate naming the pair.
void verify_adapted(const RootSystem& rs, const Diagram& d, const NestedSetFamily& fam, const AdaptedFamily& family);

// Coordinates u_B on the blow-up chart of one MNS: x_B = prod_{C >= B} u_C.
class BlowupChart {
  public:
    BlowupChart(const RootSystem& rs, const Diagram& d, const MaximalNestedSet& f, const AdaptedFamily& fam);

    int rank() const { return int(f_.elements.size()); }
    const MaximalNestedSet& mns() const { return f_; }

    Vec u_to_x(const Vec& u) const;
    Vec x_to_u(const Vec& x) const;
    Vec x_to_point(const Vec& x) const;  // h-point in coroot coordinates
    Vec point_to_x(const Vec& pt) const;
    Vec u_to_point(const Vec& u) const { return x_to_point(u_to_x(u)); }
    Vec point_to_u(const Vec& pt) const { return x_to_u(point_to_x(pt)); }

    // alpha = a_B * prod_{C >= B} u_C * P_alpha(u), P_alpha(0) = 1
    struct RootPull {
        int root;
        int min_elt;                 // index into mns elements
        Cx a;                        // leading constant a_B
        std::vector<std::pair<Cx, Subdiag>> terms;  // (a_{B'}, B') over F-elements <= B, incl. B itself
    };
    const std::vector<RootPull>& root_pulls() const { return pulls_; }
    Cx eval_p_alpha(const RootPull& rp, const Vec& u) const;  // the polynomial P_alpha at u

  private:
    const RootSystem* rs_;
    MaximalNestedSet f_;
    AdaptedFamily fam_;
    Eigen::MatrixXd coord_;      // row k = coefficients of x_{B_k} over simple roots
    Eigen::MatrixXd pt_from_x_;  // solves x-coords -> coroot coords
    std::vector<RootPull> pulls_;
};

}  // namespace casmon

#endif
