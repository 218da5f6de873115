#include "casmon/liealg.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace casmon {

namespace {

std::vector<Subdiag> connected_components(const Eigen::MatrixXi& a) {
    int n = int(a.rows());
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = nc;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w)
                if (w != v && a(v, w) != 0 && comp[w] < 0) { comp[w] = nc; stack.push_back(w); }
        }
        ++nc;
    }
    std::vector<Subdiag> out(nc, 0u);
    for (int v = 0; v < n; ++v) out[comp[v]] |= (1u << v);
    return out;
}

}  // namespace

RootSystem::RootSystem(const Eigen::MatrixXi& cartan) : cartan_(cartan) {
    rank_ = int(cartan.rows());
    if (rank_ < 1 || cartan.cols() != rank_) throw Error("NotCartan", "matrix must be square");
    if (rank_ > 3) throw Error("RankTooLarge", "built-in root systems support rank <= 3");
    for (int i = 0; i < rank_; ++i) {
        if (cartan(i, i) != 2) throw Error("NotCartan", "diagonal entries must be 2");
        for (int j = 0; j < rank_; ++j) {
            if (i == j) continue;
            if (cartan(i, j) > 0) throw Error("NotCartan", "off-diagonal entries must be <= 0");
            if ((cartan(i, j) == 0) != (cartan(j, i) == 0)) throw Error("NotCartan", "zero pattern must be symmetric");
        }
    }
    components_ = connected_components(cartan_);

    // Symmetrizers by propagation along edges: d_i a_ij = d_j a_ji.
    d_.assign(rank_, 0.0);
    for (Subdiag comp : components_) {
        int seed = __builtin_ctz(comp);
        d_[seed] = 1.0;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int i = 0; i < rank_; ++i)
                for (int j = 0; j < rank_; ++j) {
                    if (!(comp & (1u << i)) || d_[i] == 0.0 || d_[j] != 0.0) continue;
                    if (cartan_(i, j) != 0) { d_[j] = d_[i] * cartan_(i, j) / double(cartan_(j, i)); grew = true; }
                }
        }
    }
    double dmin = *std::min_element(d_.begin(), d_.end());
    if (dmin <= 0) throw Error("NotCartan", "not symmetrizable with positive form");
    for (auto& v : d_) v /= dmin;

    gram_.resize(rank_, rank_);
    for (int i = 0; i < rank_; ++i)
        for (int j = 0; j < rank_; ++j) gram_(i, j) = d_[i] * cartan_(i, j);
    if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error("NotCartan", "not symmetrizable");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
    if (es.eigenvalues().minCoeff() <= 1e-12) throw Error("NotCartan", "form not positive definite (not finite type)");

    // Positive roots by closure of simple roots along root strings.
    std::set<std::vector<int>> known;
    std::vector<Eigen::VectorXi> frontier;
    for (int i = 0; i < rank_; ++i) {
        Eigen::VectorXi v = Eigen::VectorXi::Zero(rank_);
        v(i) = 1;
        pos_roots_.push_back(v);
        known.insert(std::vector<int>(v.data(), v.data() + rank_));
    }
    auto is_root = [&](const Eigen::VectorXi& v) {
        return known.count(std::vector<int>(v.data(), v.data() + rank_)) > 0;
    };
    for (size_t idx = 0; idx < pos_roots_.size(); ++idx) {
        Eigen::VectorXi beta = pos_roots_[idx];
        for (int i = 0; i < rank_; ++i) {
            int pair = 0;  // beta(alpha_i^vee)
            for (int j = 0; j < rank_; ++j) pair += beta(j) * cartan_(i, j);
            int p = 0;
            Eigen::VectorXi down = beta;
            while (true) {
                down(i) -= 1;
                if (down == Eigen::VectorXi::Zero(rank_) || (down.minCoeff() >= 0 && is_root(down))) ++p;
                else break;
            }
            if (p - pair > 0) {
                Eigen::VectorXi up = beta;
                up(i) += 1;
                auto key = std::vector<int>(up.data(), up.data() + rank_);
                if (!known.count(key)) { known.insert(key); pos_roots_.push_back(up); }
            }
        }
    }
    std::sort(pos_roots_.begin(), pos_roots_.end(), [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
        if (a.sum() != b.sum()) return a.sum() < b.sum();
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });

    for (const auto& v : pos_roots_) {
        Eigen::VectorXd vd = v.cast<double>();
        root_norm2_.push_back(vd.dot(gram_ * vd));
        Subdiag s = 0;
        for (int j = 0; j < rank_; ++j)
            if (v(j) != 0) s |= (1u << j);
        support_.push_back(s);
    }

    Eigen::MatrixXd at = cartan_.cast<double>().transpose();
    coweights_ = at.inverse();

    coroot_gram_.resize(rank_, rank_);
    for (int i = 0; i < rank_; ++i)
        for (int j = 0; j < rank_; ++j) coroot_gram_(i, j) = cartan_(i, j) / d_[j];
}

double RootSystem::pairing(int r, const RVec& u) const {
    double acc = 0;
    for (int j = 0; j < rank_; ++j)
        for (int k = 0; k < rank_; ++k) acc += pos_roots_[r](j) * u(k) * cartan_(k, j);
    return acc;
}

int RootSystem::cartan_pairing(int r, int j) const {
    int acc = 0;
    for (int k = 0; k < rank_; ++k) acc += pos_roots_[r](k) * cartan_(j, k);
    return acc;
}

double RootSystem::coroot_form(const RVec& u, const RVec& v) const { return u.dot(coroot_gram_ * v); }

double RootSystem::coweight_norm2(int i) const {
    RVec w = coweights_.col(i);
    return coroot_form(w, w);
}

std::vector<int> RootSystem::positive_roots_of(Subdiag b) const {
    std::vector<int> out;
    for (int r = 0; r < num_positive(); ++r)
        if (root_in(r, b)) out.push_back(r);
    return out;
}

RVec RootSystem::coroot_of(int r) const {
    RVec c = RVec::Zero(rank_);
    for (int j = 0; j < rank_; ++j) c(j) = 2.0 * d_[j] * pos_roots_[r](j) / root_norm2_[r];
    return c;
}

std::shared_ptr<const RootSystem> build_root_system(const Eigen::MatrixXi& cartan) {
    return std::make_shared<const RootSystem>(cartan);
}

Mat Representation::leg(int i, const Mat& m) const {
    Mat out = Mat::Identity(1, 1);
    for (int k = 0; k < legs(); ++k) {
        if (k == i) out = kron(out, m);
        else out = kron(out, Mat::Identity(factor_dims[k], factor_dims[k]));
    }
    return out;
}

Mat Representation::cartan_action(const RVec& u) const {
    Mat out = Mat::Zero(dim, dim);
    for (int k = 0; k < rs->rank(); ++k) out += Cx(u(k)) * h[k];
    return out;
}

Mat Representation::cartan_action_factor(int fct, const RVec& u) const {
    Mat out = Mat::Zero(factor_dims[fct], factor_dims[fct]);
    for (int k = 0; k < rs->rank(); ++k) out += Cx(u(k)) * fh[fct][k];
    return out;
}

Mat Representation::cartan_action_cx(const Vec& u) const {
    Mat out = Mat::Zero(dim, dim);
    for (int k = 0; k < rs->rank(); ++k) out += u(k) * h[k];
    return out;
}

Mat Representation::cartan_action_factor_cx(int fct, const Vec& u) const {
    Mat out = Mat::Zero(factor_dims[fct], factor_dims[fct]);
    for (int k = 0; k < rs->rank(); ++k) out += u(k) * fh[fct][k];
    return out;
}

RVec Representation::mu_weights(const RVec& u) const {
    Mat m = cartan_action(u);
    RVec out(dim);
    for (int b = 0; b < dim; ++b) out(b) = m(b, b).real();
    return out;
}

Mat Representation::tits_reflection(int i) const { return expm(e[i]) * expm(-f[i]) * expm(e[i]); }

Representation Representation::chevalley_twist() const {
    Representation t = *this;
    for (size_t i = 0; i < e.size(); ++i) {
        t.e[i] = -f[i];
        t.f[i] = -e[i];
        t.h[i] = -h[i];
    }
    for (int fct = 0; fct < legs(); ++fct)
        for (size_t i = 0; i < e.size(); ++i) {
            t.fe[fct][i] = -ff[fct][i];
            t.ff[fct][i] = -fe[fct][i];
            t.fh[fct][i] = -fh[fct][i];
        }
    t.weights = -weights;
    return t;
}

double Representation::relation_residual() const {
    const auto& a = rs->cartan();
    int r = rs->rank();
    double res = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            res = std::max(res, mat_norm(commutator(h[i], e[j]) - Cx(a(i, j)) * e[j]));
            res = std::max(res, mat_norm(commutator(h[i], f[j]) + Cx(a(i, j)) * f[j]));
            Mat target = (i == j) ? h[i] : Mat::Zero(dim, dim);
            res = std::max(res, mat_norm(commutator(e[i], f[j]) - target));
            if (i != j) {
                Mat ad_e = e[j], ad_f = f[j];
                for (int k = 0; k < 1 - a(i, j); ++k) { ad_e = commutator(e[i], ad_e); ad_f = commutator(f[i], ad_f); }
                res = std::max(res, mat_norm(ad_e));
                res = std::max(res, mat_norm(ad_f));
            }
        }
    return res;
}

namespace {

void finalize_single(Representation& rep) {
    int r = rep.rs->rank();
    rep.factor_dims = {rep.dim};
    rep.fe = {rep.e};
    rep.ff = {rep.f};
    rep.fh = {rep.h};
    rep.weights.resize(rep.dim, r);
    for (int i = 0; i < r; ++i)
        for (int b = 0; b < rep.dim; ++b) {
            if (std::abs(rep.h[i](b, b).imag()) > 1e-9) throw Error("RelationViolation", "cartan generators must be real diagonal");
            for (int c = 0; c < rep.dim; ++c)
                if (b != c && std::abs(rep.h[i](b, c)) > 1e-9) throw Error("RelationViolation", "cartan generators must be diagonal");
            rep.weights(b, i) = rep.h[i](b, b).real();
        }
    // Dynkin index from tr(e_i f_i) = 2 I / (a_i, a_i); zero for the trivial rep.
    rep.index = {0.0};
    for (int i = 0; i < r; ++i) {
        double t = (rep.e[i] * rep.f[i]).trace().real() * rep.rs->simple_norm2(i) / 2.0;
        if (t > 1e-12) { rep.index[0] = t; break; }
    }
    double res = rep.relation_residual();
    if (res > 1e-9) throw Error("RelationViolation", "generator matrices violate Chevalley/Serre relations, residual " + std::to_string(res));
}

}  // namespace

Representation sl2_irrep(int m) {
    if (m < 0) throw Error("RelationViolation", "sl2 irrep label must be >= 0");
    Eigen::MatrixXi cartan(1, 1);
    cartan << 2;
    Representation rep;
    rep.rs = build_root_system(cartan);
    rep.dim = m + 1;
    Mat e = Mat::Zero(m + 1, m + 1), f = Mat::Zero(m + 1, m + 1), h = Mat::Zero(m + 1, m + 1);
    for (int j = 0; j <= m; ++j) {
        h(j, j) = m - 2 * j;
        if (j < m) f(j + 1, j) = 1;
        if (j > 0) e(j - 1, j) = double(j) * (m - j + 1);
    }
    rep.e = {e};
    rep.f = {f};
    rep.h = {h};
    finalize_single(rep);
    return rep;
}

Representation sln_defining(int n) {
    if (n < 2 || n > 4) throw Error("RelationViolation", "defining reps built in for sl_n, n in {2,3,4}");
    Eigen::MatrixXi cartan(n - 1, n - 1);
    cartan.setZero();
    for (int i = 0; i < n - 1; ++i) {
        cartan(i, i) = 2;
        if (i + 1 < n - 1) { cartan(i, i + 1) = -1; cartan(i + 1, i) = -1; }
    }
    Representation rep;
    rep.rs = build_root_system(cartan);
    rep.dim = n;
    for (int i = 0; i < n - 1; ++i) {
        Mat e = Mat::Zero(n, n), f = Mat::Zero(n, n), h = Mat::Zero(n, n);
        e(i, i + 1) = 1;
        f(i + 1, i) = 1;
        h(i, i) = 1;
        h(i + 1, i + 1) = -1;
        rep.e.push_back(e);
        rep.f.push_back(f);
        rep.h.push_back(h);
    }
    finalize_single(rep);
    return rep;
}

Representation trivial_rep(std::shared_ptr<const RootSystem> rs) {
    Representation rep;
    rep.rs = std::move(rs);
    rep.dim = 1;
    for (int i = 0; i < rep.rs->rank(); ++i) {
        rep.e.push_back(Mat::Zero(1, 1));
        rep.f.push_back(Mat::Zero(1, 1));
        rep.h.push_back(Mat::Zero(1, 1));
    }
    finalize_single(rep);
    return rep;
}

Representation as_single_leg(const Representation& rep) {
    Representation out;
    out.rs = rep.rs;
    out.dim = rep.dim;
    out.e = rep.e;
    out.f = rep.f;
    out.h = rep.h;
    finalize_single(out);
    return out;
}

Representation rep_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IOError", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    int rank = j.at("rank").get<int>();
    Eigen::MatrixXi cartan(rank, rank);
    for (int a = 0; a < rank; ++a)
        for (int b = 0; b < rank; ++b) cartan(a, b) = j.at("cartan").at(a).at(b).get<int>();
    auto read_mats = [&](const char* key) {
        std::vector<Mat> out;
        for (const auto& jm : j.at("generators").at(key)) {
            int d = int(jm.size());
            Mat m(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const auto& cell = jm.at(a).at(b);
                    if (cell.is_array()) m(a, b) = Cx(cell.at(0).get<double>(), cell.at(1).get<double>());
                    else m(a, b) = Cx(cell.get<double>(), 0.0);
                }
            out.push_back(m);
        }
        return out;
    };
    Representation rep;
    rep.rs = build_root_system(cartan);
    rep.e = read_mats("e");
    rep.f = read_mats("f");
    rep.h = read_mats("h");
    if (int(rep.e.size()) != rank || int(rep.f.size()) != rank || int(rep.h.size()) != rank)
        throw Error("RelationViolation", "need one e/f/h matrix per simple root");
    rep.dim = int(rep.e[0].rows());
    finalize_single(rep);
    return rep;
}

Representation tensor(const std::vector<Representation>& reps) {
    if (reps.empty()) throw Error("MixedAlgebras", "empty tensor product");
    for (const auto& r : reps)
        if (r.rs->cartan() != reps[0].rs->cartan()) throw Error("MixedAlgebras", "tensor factors over different root systems");
    Representation out;
    out.rs = reps[0].rs;
    out.dim = 1;
    for (const auto& r : reps) {
        for (int f = 0; f < r.legs(); ++f) {
            out.factor_dims.push_back(r.factor_dims[f]);
            out.fe.push_back(r.fe[f]);
            out.ff.push_back(r.ff[f]);
            out.fh.push_back(r.fh[f]);
            out.index.push_back(r.index[f]);
        }
        out.dim *= r.dim;
    }
    int rk = out.rs->rank();
    out.e.assign(rk, Mat::Zero(out.dim, out.dim));
    out.f.assign(rk, Mat::Zero(out.dim, out.dim));
    out.h.assign(rk, Mat::Zero(out.dim, out.dim));
    for (int i = 0; i < rk; ++i)
        for (int l = 0; l < out.legs(); ++l) {
            out.e[i] += out.leg(l, out.fe[l][i]);
            out.f[i] += out.leg(l, out.ff[l][i]);
            out.h[i] += out.leg(l, out.fh[l][i]);
        }
    out.weights.resize(out.dim, rk);
    for (int i = 0; i < rk; ++i)
        for (int b = 0; b < out.dim; ++b) out.weights(b, i) = out.h[i](b, b).real();
    return out;
}

RootVectors root_vectors(const Representation& rep) {
    const auto& rs = *rep.rs;
    int np = rs.num_positive();
    int nf = rep.legs();
    RootVectors rv;
    rv.fxp.assign(nf, std::vector<Mat>(np));
    rv.fxm.assign(nf, std::vector<Mat>(np));
    rv.xp.assign(np, Mat::Zero(rep.dim, rep.dim));
    rv.xm.assign(np, Mat::Zero(rep.dim, rep.dim));

    int ref = -1;  // reference faithful factor for normalization scalars
    for (int f = 0; f < nf; ++f)
        if (rep.index[f] > 1e-12) { ref = f; break; }

    // raw chains per factor; normalization scalar from the reference factor
    std::vector<double> scale(np, 1.0);
    std::vector<std::vector<Mat>> raw_p(nf, std::vector<Mat>(np)), raw_m(nf, std::vector<Mat>(np));
    for (int r = 0; r < np; ++r) {
        const auto& root = rs.pos_root(r);
        if (root.sum() == 1) {
            int i = 0;
            while (root(i) == 0) ++i;
            for (int f = 0; f < nf; ++f) { raw_p[f][r] = rep.fe[f][i]; raw_m[f][r] = rep.ff[f][i]; }
        } else {
            // decompositions root = alpha_i + beta with beta a positive root, in vertex order
            std::vector<std::pair<int, int>> options;
            for (int i = 0; i < rs.rank(); ++i) {
                if (root(i) == 0) continue;
                Eigen::VectorXi beta = root;
                beta(i) -= 1;
                for (int q = 0; q < np; ++q)
                    if (rs.pos_root(q) == beta) options.emplace_back(i, q);
            }
            bool done = false;
            for (auto [i, q] : options) {
                bool ok = true;
                for (int f = 0; f < nf && ok; ++f) {
                    raw_p[f][r] = commutator(rep.fe[f][i], raw_p[f][q]);
                    raw_m[f][r] = commutator(rep.ff[f][i], raw_m[f][q]);
                    if (f == ref && mat_norm(raw_p[f][r]) < 1e-10) ok = false;
                }
                if (ok) { done = true; break; }
            }
            if (!done) throw Error("ZeroBracket", "all bracket chains vanish for a positive root");
        }
        if (ref >= 0) {
            double s = ((raw_p[ref][r] * raw_m[ref][r]).trace().real()) / rep.index[ref];
            if (std::abs(s) < 1e-12) throw Error("ZeroBracket", "degenerate pairing for root vector");
            scale[r] = s;
        }
    }
    for (int r = 0; r < np; ++r)
        for (int f = 0; f < nf; ++f) {
            rv.fxp[f][r] = raw_p[f][r] / scale[r];
            rv.fxm[f][r] = raw_m[f][r];
            rv.xp[r] += rep.leg(f, rv.fxp[f][r]);
            rv.xm[r] += rep.leg(f, rv.fxm[f][r]);
        }
    return rv;
}

Mat Tensors::omega_h(int li, int lj, Subdiag b) const {
    const auto& rs = *rep_->rs;
    std::vector<int> verts;
    for (int i = 0; i < rs.rank(); ++i)
        if (b & (1u << i)) verts.push_back(i);
    int n = int(verts.size());
    if (n == 0) return Mat::Zero(rep_->dim, rep_->dim);
    Eigen::MatrixXd g(n, n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
            RVec ea = RVec::Zero(rs.rank()), ec = RVec::Zero(rs.rank());
            ea(verts[a]) = 1;
            ec(verts[c]) = 1;
            g(a, c) = rs.coroot_form(ea, ec);
        }
    Eigen::MatrixXd ginv = g.inverse();
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
            Mat ha = rep_->leg(li, rep_->fh[li][verts[a]]);
            Mat hc = rep_->leg(lj, rep_->fh[lj][verts[c]]);
            out += Cx(ginv(a, c)) * ha * hc;
        }
    return out;
}

Mat Tensors::omega(int li, int lj, Subdiag b) const {
    Mat out = omega_h(li, lj, b);
    for (int r : rep_->rs->positive_roots_of(b)) {
        out += rep_->leg(li, rv_.fxp[li][r]) * rep_->leg(lj, rv_.fxm[lj][r]);
        out += rep_->leg(li, rv_.fxm[li][r]) * rep_->leg(lj, rv_.fxp[lj][r]);
    }
    return out;
}

Mat Tensors::omega_full(Subdiag b) const {
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int i = 0; i < rep_->legs(); ++i)
        for (int j = i + 1; j < rep_->legs(); ++j) out += omega(i, j, b);
    return out;
}

Mat Tensors::omega_h_full(Subdiag b) const {
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int i = 0; i < rep_->legs(); ++i)
        for (int j = i + 1; j < rep_->legs(); ++j) out += omega_h(i, j, b);
    return out;
}

Mat Tensors::k_alpha(int r) const { return rv_.xp[r] * rv_.xm[r] + rv_.xm[r] * rv_.xp[r]; }

Mat Tensors::k_alpha_leg(int li, int r) const {
    Mat xp = rep_->leg(li, rv_.fxp[li][r]), xm = rep_->leg(li, rv_.fxm[li][r]);
    return xp * xm + xm * xp;
}

Mat Tensors::c_alpha(int r) const {
    Mat h = rep_->cartan_action(rep_->rs->coroot_of(r));
    return k_alpha(r) + Cx(rep_->rs->root_norm2(r) / 4.0) * h * h;
}

Mat Tensors::k_sub(Subdiag b) const {
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int r : rep_->rs->positive_roots_of(b)) out += k_alpha(r);
    return out;
}

Mat Tensors::c_sub(Subdiag b) const {
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int r : rep_->rs->positive_roots_of(b)) out += c_alpha(r);
    return out;
}

Mat Tensors::r_matrix_classical(int li, int lj, Subdiag b) const {
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    for (int r : rep_->rs->positive_roots_of(b)) out += rep_->leg(li, rv_.fxp[li][r]) * rep_->leg(lj, rv_.fxm[lj][r]);
    return out;
}

Mat Tensors::lambda(int vertex, int li, int lj) const {
    RVec w = rep_->rs->fundamental_coweight(vertex);
    double n2 = rep_->rs->coweight_norm2(vertex);
    Mat wi = rep_->leg(li, rep_->cartan_action_factor(li, w));
    Mat wj = rep_->leg(lj, rep_->cartan_action_factor(lj, w));
    return wi * wj / Cx(n2);
}

Mat Tensors::casimir(Subdiag b) const {
    // Cartan part with both legs diagonal plus root part.
    const auto& rs = *rep_->rs;
    std::vector<int> verts;
    for (int i = 0; i < rs.rank(); ++i)
        if (b & (1u << i)) verts.push_back(i);
    Mat out = Mat::Zero(rep_->dim, rep_->dim);
    int n = int(verts.size());
    if (n) {
        Eigen::MatrixXd g(n, n);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) g(a, c) = rs.coroot_gram()(verts[a], verts[c]);
        Eigen::MatrixXd ginv = g.inverse();
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) out += Cx(ginv(a, c)) * rep_->h[verts[a]] * rep_->h[verts[c]];
    }
    out += k_sub(b);
    return out;
}

Mat chevalley_theta_matrix(const Representation& rep) {
    // Solve theta rho(x) = rho(Theta x) theta as a nullspace problem.
    int d = rep.dim;
    int rows = 0;
    std::vector<Mat> lhs, rhs;
    for (size_t i = 0; i < rep.e.size(); ++i) {
        lhs.push_back(rep.e[i]); rhs.push_back(-rep.f[i]);
        lhs.push_back(rep.f[i]); rhs.push_back(-rep.e[i]);
        lhs.push_back(rep.h[i]); rhs.push_back(-rep.h[i]);
        rows += 3;
    }
    Mat sys = Mat::Zero(rows * d * d, d * d);
    for (int t = 0; t < rows; ++t) {
        // theta * lhs - rhs * theta = 0, vectorized row-major: theta_{ab}
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) {
                    sys(t * d * d + a * d + b, a * d + c) += lhs[t](c, b);
                    sys(t * d * d + a * d + b, c * d + b) -= rhs[t](a, c);
                }
    }
    Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeThinV);
    if (svd.singularValues()(d * d - 1) > 1e-8) throw Error("NoIntertwiner", "representation is not Chevalley self-dual");
    Vec v = svd.matrixV().col(d * d - 1);
    Mat theta(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) theta(a, b) = v(a * d + b);
    // normalize so theta^2 = id (defined up to scale on irreducibles)
    Mat t2 = theta * theta;
    Cx s = t2(0, 0);
    theta /= std::sqrt(s);
    return theta;
}

}  // namespace casmon
