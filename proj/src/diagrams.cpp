#include "casmon/diagrams.hpp"

#include <algorithm>
#include <deque>

namespace casmon {

Diagram::Diagram(int n, const std::vector<std::pair<int, int>>& edges, const std::map<std::pair<int, int>, int>& labels)
    : n_(n), adj_(Eigen::MatrixXi::Zero(n, n)), labels_(labels) {
    for (auto [i, j] : edges) {
        if (i == j) throw Error("BadDiagram", "loops not allowed");
        if (adj_(i, j)) throw Error("BadDiagram", "multiple edges not allowed");
        adj_(i, j) = adj_(j, i) = 1;
    }
    for (auto& [key, m] : labels_) {
        bool orth = adj_(key.first, key.second) == 0;
        if ((m == 2) != orth) throw Error("BadDiagram", "label 2 must coincide with orthogonality");
    }
}

Diagram Diagram::from_root_system(const RootSystem& rs) {
    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, int> labels;
    static const int order_of[4] = {2, 3, 4, 6};
    for (int i = 0; i < rs.rank(); ++i)
        for (int j = i + 1; j < rs.rank(); ++j) {
            int prod = rs.cartan()(i, j) * rs.cartan()(j, i);
            if (prod > 0) edges.push_back({i, j});
            labels[{i, j}] = order_of[prod];
        }
    return Diagram(rs.rank(), edges, labels);
}

Diagram Diagram::type_a(int vertices) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < vertices; ++i) edges.push_back({i, i + 1});
    return Diagram(vertices, edges);
}

int Diagram::label(int i, int j) const {
    auto it = labels_.find({std::min(i, j), std::max(i, j)});
    if (it != labels_.end()) return it->second;
    return edge(i, j) ? 3 : 2;
}

bool Diagram::connected(Subdiag b) const {
    if (b == 0) return false;
    int seed = __builtin_ctz(b);
    Subdiag seen = 1u << seed;
    std::deque<int> q{seed};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w = 0; w < n_; ++w)
            if ((b & (1u << w)) && !(seen & (1u << w)) && adj_(v, w)) { seen |= 1u << w; q.push_back(w); }
    }
    return seen == b;
}

bool Diagram::orthogonal(Subdiag a, Subdiag b) const {
    if (a & b) return false;
    for (int i = 0; i < n_; ++i)
        if (a & (1u << i))
            for (int j = 0; j < n_; ++j)
                if ((b & (1u << j)) && adj_(i, j)) return false;
    return true;
}

bool Diagram::compatible(Subdiag a, Subdiag b) const {
    return subdiag_contains(a, b) || subdiag_contains(b, a) || orthogonal(a, b);
}

std::vector<Subdiag> Diagram::components(Subdiag b) const {
    std::vector<Subdiag> out;
    Subdiag rest = b;
    while (rest) {
        int seed = __builtin_ctz(rest);
        Subdiag comp = 1u << seed;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int v = 0; v < n_; ++v)
                if (comp & (1u << v))
                    for (int w = 0; w < n_; ++w)
                        if ((rest & (1u << w)) && !(comp & (1u << w)) && adj_(v, w)) { comp |= 1u << w; grew = true; }
        }
        out.push_back(comp);
        rest &= ~comp;
    }
    return out;
}

std::vector<Subdiag> Diagram::connected_subdiagrams() const {
    std::vector<Subdiag> out;
    for (Subdiag b = 1; b <= full(); ++b)
        if (connected(b)) out.push_back(b);
    return out;
}

namespace {

void sort_canonical(std::vector<Subdiag>& v) {
    std::sort(v.begin(), v.end(), [](Subdiag a, Subdiag b) {
        if (subdiag_size(a) != subdiag_size(b)) return subdiag_size(a) < subdiag_size(b);
        return a < b;
    });
}

// All MNS on a connected mask, built by removing a marked vertex and recursing
// into the components; this also produces the marked-vertex map.
std::vector<MaximalNestedSet> mns_on(const Diagram& d, Subdiag mask) {
    std::vector<MaximalNestedSet> out;
    if (subdiag_size(mask) == 1) {
        MaximalNestedSet m;
        m.elements = {mask};
        m.marked[mask] = __builtin_ctz(mask);
        out.push_back(m);
        return out;
    }
    for (int v = 0; v < d.size(); ++v) {
        if (!(mask & (1u << v))) continue;
        auto comps = d.components(mask & ~(1u << v));
        std::vector<std::vector<MaximalNestedSet>> sub;
        for (Subdiag c : comps) sub.push_back(mns_on(d, c));
        std::vector<int> idx(sub.size(), 0);
        while (true) {
            MaximalNestedSet m;
            m.elements = {mask};
            m.marked[mask] = v;
            for (size_t k = 0; k < sub.size(); ++k) {
                const auto& part = sub[k][idx[k]];
                m.elements.insert(m.elements.end(), part.elements.begin(), part.elements.end());
                m.marked.insert(part.marked.begin(), part.marked.end());
            }
            sort_canonical(m.elements);
            out.push_back(std::move(m));
            int k = int(sub.size()) - 1;
            while (k >= 0 && ++idx[k] == int(sub[k].size())) { idx[k] = 0; --k; }
            if (k < 0) break;
        }
    }
    return out;
}

}  // namespace

NestedSetFamily enumerate_nested_sets(const Diagram& d) {
    if (!d.connected(d.full())) throw Error("Disconnected", "nested sets require a connected diagram");
    NestedSetFamily fam;
    fam.mns = mns_on(d, d.full());
    std::sort(fam.mns.begin(), fam.mns.end(),
              [](const MaximalNestedSet& a, const MaximalNestedSet& b) { return a.elements < b.elements; });

    auto all = d.connected_subdiagrams();
    // every nested set contains D; iterate over subsets of the remaining subdiagrams
    std::vector<Subdiag> rest;
    for (Subdiag b : all)
        if (b != d.full()) rest.push_back(b);
    int m = int(rest.size());
    for (unsigned s = 0; s < (1u << m); ++s) {
        std::vector<Subdiag> ns{d.full()};
        for (int k = 0; k < m; ++k)
            if (s & (1u << k)) ns.push_back(rest[k]);
        bool ok = true;
        for (size_t a = 0; a < ns.size() && ok; ++a)
            for (size_t b = a + 1; b < ns.size() && ok; ++b)
                if (!d.compatible(ns[a], ns[b])) ok = false;
        if (ok) {
            sort_canonical(ns);
            fam.nested_sets.push_back(ns);
        }
    }
    return fam;
}

long count_bracketings(int letters) {
    std::vector<long> t(letters + 1, 0);
    t[1] = 1;
    for (int n = 2; n <= letters; ++n)
        for (int k = 1; k < n; ++k) t[n] += t[k] * t[n - k];
    return t[letters];
}

MnsPairData mns_pair_data(const Diagram& d, const NestedSetFamily& fam, int f_idx, int g_idx) {
    (void)d;
    MnsPairData out;
    const auto& f = fam.mns[f_idx].elements;
    const auto& g = fam.mns[g_idx].elements;
    std::vector<Subdiag> fd, common;
    for (Subdiag b : f)
        if (!std::count(g.begin(), g.end(), b)) fd.push_back(b);
        else common.push_back(b);
    if (fd.empty()) {
        out.chain = {f_idx};
        return out;
    }
    if (fd.size() == 1) {
        out.elementary = true;
        Subdiag moved = fd[0];
        Subdiag supp = 0;
        for (Subdiag b : common)
            if (subdiag_contains(b, moved) && (supp == 0 || subdiag_size(b) < subdiag_size(supp))) supp = b;
        out.supp = supp;
        for (Subdiag b : common)
            if (b != supp && subdiag_contains(supp, b)) out.zsupp |= b;
        out.chain = {f_idx, g_idx};
        return out;
    }
    // shortest path through elementary pairs, lexicographic tie-break by index
    int n = int(fam.mns.size());
    std::vector<int> prev(n, -1), dist(n, -1);
    std::deque<int> q{f_idx};
    dist[f_idx] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w = 0; w < n; ++w) {
            if (dist[w] >= 0 || w == v) continue;
            int diff = 0;
            for (Subdiag b : fam.mns[v].elements)
                if (!std::count(fam.mns[w].elements.begin(), fam.mns[w].elements.end(), b)) ++diff;
            if (diff == 1) { dist[w] = dist[v] + 1; prev[w] = v; q.push_back(w); }
        }
    }
    if (dist[g_idx] < 0) throw Error("Disconnected", "MNS adjacency graph not connected");
    std::vector<int> chain;
    for (int v = g_idx; v >= 0; v = prev[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    out.chain = chain;
    return out;
}

AdaptedFamily::AdaptedFamily(const RootSystem& rs, const Diagram& d, std::map<Subdiag, RVec> x) : rs_(&rs), x_(std::move(x)) {
    (void)d;
}

AdaptedFamily AdaptedFamily::standard(const RootSystem& rs, const Diagram& d) {
    std::map<Subdiag, RVec> x;
    for (Subdiag b : d.connected_subdiagrams()) {
        RVec acc = RVec::Zero(rs.rank());
        for (int r : rs.positive_roots_of(b)) acc += rs.pos_root(r).cast<double>();
        x[b] = acc;
    }
    return AdaptedFamily(rs, d, std::move(x));
}

const RVec& AdaptedFamily::x(Subdiag b) const {
    auto it = x_.find(b);
    if (it == x_.end()) throw Error("NotAdapted", "family has no element for requested subdiagram");
    return it->second;
}

double AdaptedFamily::eval(Subdiag b, const RVec& pt) const {
    const RVec& c = x(b);
    double acc = 0;
    for (int j = 0; j < rs_->rank(); ++j)
        for (int k = 0; k < rs_->rank(); ++k) acc += c(j) * pt(k) * rs_->cartan()(k, j);
    return acc;
}

Cx AdaptedFamily::eval(Subdiag b, const Vec& pt) const {
    const RVec& c = x(b);
    Cx acc = 0;
    for (int j = 0; j < rs_->rank(); ++j)
        for (int k = 0; k < rs_->rank(); ++k) acc += c(j) * pt(k) * double(rs_->cartan()(k, j));
    return acc;
}

void verify_adapted(const RootSystem& rs, const Diagram& d, const NestedSetFamily& fam, const AdaptedFamily& family) {
    for (size_t fi = 0; fi < fam.mns.size(); ++fi) {
        const auto& f = fam.mns[fi];
        for (Subdiag b : f.elements) {
            std::vector<Subdiag> inside;
            for (Subdiag c : f.elements)
                if (subdiag_contains(b, c)) inside.push_back(c);
            int nb = subdiag_size(b);
            std::vector<int> verts;
            for (int v = 0; v < d.size(); ++v)
                if (b & (1u << v)) verts.push_back(v);
            Eigen::MatrixXd m(int(inside.size()), nb);
            for (size_t row = 0; row < inside.size(); ++row) {
                const RVec& c = family.x(inside[row]);
                for (int col = 0; col < nb; ++col) m(int(row), col) = c(verts[col]);
                for (int v = 0; v < rs.rank(); ++v)
                    if (!(b & (1u << v)) && std::abs(c(v)) > 1e-12)
                        throw Error("BasisDegenerate",
                                    "x_C not supported in B for (F=" + std::to_string(fi) + ", B=" + std::to_string(b) + ")");
            }
            if (int(inside.size()) != nb || std::abs(m.determinant()) < 1e-10)
                throw Error("BasisDegenerate",
                            "basis condition fails for (F=" + std::to_string(fi) + ", B=" + std::to_string(b) + ")");
        }
    }
}

BlowupChart::BlowupChart(const RootSystem& rs, const Diagram& d, const MaximalNestedSet& f, const AdaptedFamily& fam)
    : rs_(&rs), f_(f), fam_(fam) {
    int n = rank();
    coord_.resize(n, rs.rank());
    for (int k = 0; k < n; ++k) coord_.row(k) = fam.x(f_.elements[k]).transpose();
    // x_B(y) = c_B^T A^T u for y in coroot coordinates u
    Eigen::MatrixXd m = coord_ * rs.cartan().cast<double>().transpose();
    pt_from_x_ = m.inverse();

    for (int r = 0; r < rs.num_positive(); ++r) {
        RootPull rp;
        rp.root = r;
        rp.min_elt = -1;
        for (int k = 0; k < n; ++k)
            if (subdiag_contains(f_.elements[k], rs.root_support(r)))
                if (rp.min_elt < 0 || subdiag_size(f_.elements[k]) < subdiag_size(f_.elements[rp.min_elt])) rp.min_elt = k;
        Subdiag bmin = f_.elements[rp.min_elt];
        // solve alpha = sum_{C <= bmin} a_C x_C on the vertex coordinates of bmin
        std::vector<int> rows;
        for (int k = 0; k < n; ++k)
            if (subdiag_contains(bmin, f_.elements[k])) rows.push_back(k);
        std::vector<int> verts;
        for (int v = 0; v < d.size(); ++v)
            if (bmin & (1u << v)) verts.push_back(v);
        Eigen::MatrixXd m2(int(verts.size()), int(rows.size()));
        Eigen::VectorXd rhs(int(verts.size()));
        for (size_t a = 0; a < verts.size(); ++a) {
            rhs(int(a)) = rs.pos_root(r)(verts[a]);
            for (size_t c = 0; c < rows.size(); ++c) m2(int(a), int(c)) = coord_(rows[c], verts[a]);
        }
        Eigen::VectorXd sol = m2.partialPivLu().solve(rhs);
        for (size_t c = 0; c < rows.size(); ++c)
            if (std::abs(sol(int(c))) > 1e-13) rp.terms.push_back({Cx(sol(int(c))), f_.elements[rows[c]]});
        for (auto& [a, bb] : rp.terms)
            if (bb == bmin) rp.a = a;
        if (std::abs(rp.a) < 1e-12) throw Error("NotAdapted", "leading pullback coefficient vanishes");
        pulls_.push_back(std::move(rp));
    }
}

Vec BlowupChart::u_to_x(const Vec& u) const {
    int n = rank();
    Vec x(n);
    for (int k = 0; k < n; ++k) {
        Cx prod = 1;
        for (int c = 0; c < n; ++c)
            if (subdiag_contains(f_.elements[c], f_.elements[k])) prod *= u(c);
        x(k) = prod;
    }
    return x;
}

Vec BlowupChart::x_to_u(const Vec& x) const {
    int n = rank();
    Vec u(n);
    for (int k = 0; k < n; ++k) {
        int parent = -1;
        for (int c = 0; c < n; ++c) {
            if (c == k) continue;
            if (subdiag_contains(f_.elements[c], f_.elements[k]))
                if (parent < 0 || subdiag_size(f_.elements[c]) < subdiag_size(f_.elements[parent])) parent = c;
        }
        u(k) = parent < 0 ? x(k) : x(k) / x(parent);
    }
    return u;
}

Vec BlowupChart::x_to_point(const Vec& x) const { return pt_from_x_.cast<Cx>() * x; }

Vec BlowupChart::point_to_x(const Vec& pt) const {
    Eigen::MatrixXd m = coord_ * rs_->cartan().cast<double>().transpose();
    return m.cast<Cx>() * pt;
}

Cx BlowupChart::eval_p_alpha(const RootPull& rp, const Vec& u) const {
    Subdiag bmin = f_.elements[rp.min_elt];
    Cx acc = 0;
    for (auto& [a, b] : rp.terms) {
        Cx ratio = 1;  // x_{B'} / x_B = product of u_C over B' <= C < B
        for (int c = 0; c < rank(); ++c)
            if (subdiag_contains(f_.elements[c], b) && !subdiag_contains(f_.elements[c], bmin)) ratio *= u(c);
        acc += (a / rp.a) * ratio;
    }
    return acc;
}

}  // namespace casmon
