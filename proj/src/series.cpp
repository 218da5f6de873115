#include "casmon/series.hpp"

namespace casmon {

Series Series::constant(int order, const Mat& m) {
    Series s(order, int(m.rows()));
    s.c_[0] = m;
    return s;
}

Series Series::identity(int order, int dim) { return constant(order, Mat::Identity(dim, dim)); }

Series& Series::operator+=(const Series& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Series& Series::operator-=(const Series& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Series operator*(const Series& a, const Series& b) {
    Series r(a.order(), a.dim());
    for (int k = 0; k <= a.order(); ++k)
        for (int i = 0; i <= k; ++i) r.c_[k] += a.c_[i] * b.c_[k - i];
    return r;
}

Series operator*(Cx s, Series a) {
    for (auto& m : a.c_) m *= s;
    return a;
}

Series Series::shifted(int k) const {
    Series r(order(), dim());
    for (int j = 0; j + k <= order(); ++j) r.c_[j + k] = c_[j];
    return r;
}

Series Series::truncated(int new_order) const {
    Series r(new_order, dim());
    for (int j = 0; j <= std::min(new_order, order()); ++j) r.c_[j] = c_[j];
    return r;
}

Series Series::inverse() const {
    Series r(order(), dim());
    Mat inv0 = c_[0].partialPivLu().solve(Mat::Identity(dim(), dim()));
    r.c_[0] = inv0;
    for (int k = 1; k <= order(); ++k) {
        Mat acc = Mat::Zero(dim(), dim());
        for (int j = 0; j < k; ++j) acc += c_[k - j] * r.c_[j];
        r.c_[k] = -inv0 * acc;
    }
    return r;
}

Series Series::exp() const {
    double n = norm();
    int s = 0;
    while (n > 0.5) { n /= 2; ++s; }
    Series x = Cx(std::pow(0.5, s)) * (*this);
    Series term = identity(order(), dim());
    Series sum = term;
    int kmax = 30 + 4 * order();
    for (int k = 1; k < kmax; ++k) {
        term = Cx(1.0 / k) * (term * x);
        sum += term;
        if (term.norm() < 1e-18 * (1 + sum.norm())) break;
    }
    for (int k = 0; k < s; ++k) sum = sum * sum;
    return sum;
}

Series Series::transpose() const {
    Series r(order(), dim());
    for (int k = 0; k <= order(); ++k) r.c_[k] = c_[k].transpose();
    return r;
}

Series Series::conj_by(const Mat& p, const Mat& pinv) const {
    Series r(order(), dim());
    for (int k = 0; k <= order(); ++k) r.c_[k] = p * c_[k] * pinv;
    return r;
}

double Series::norm() const {
    double n = 0;
    for (const auto& m : c_) n = std::max(n, mat_norm(m));
    return n;
}

Mat Series::eval(Cx hbar) const {
    Mat r = Mat::Zero(dim(), dim());
    Cx p = 1;
    for (const auto& m : c_) { r += p * m; p *= hbar; }
    return r;
}

Series kron_series(const Series& a, const Series& b) {
    Series out(a.order(), a.dim() * b.dim());
    for (int k = 0; k <= a.order(); ++k)
        for (int i = 0; i <= k; ++i) out[k] += kron(a[i], b[k - i]);
    return out;
}

Series power_of(const Mat& m, Cx logz, int order, int hbar_weight) {
    int d = int(m.rows());
    if (hbar_weight == 0 && order == 0) return Series::constant(0, expm(logz * m));
    Series x(order, d);
    if (hbar_weight <= order) x[hbar_weight] = logz * m;
    return x.exp();
}

SSeries operator+(const SSeries& a, const SSeries& b) {
    SSeries r(a.order());
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

SSeries operator-(const SSeries& a, const SSeries& b) {
    SSeries r(a.order());
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

SSeries operator*(const SSeries& a, const SSeries& b) {
    SSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k)
        for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
}

SSeries operator*(Cx s, SSeries a) {
    for (auto& v : a.c) v *= s;
    return a;
}

SSeries SSeries::inverse() const {
    SSeries r(order());
    Cx inv0 = Cx(1) / c[0];
    r.c[0] = inv0;
    for (int k = 1; k <= order(); ++k) {
        Cx acc = 0;
        for (int j = 0; j < k; ++j) acc += c[k - j] * r.c[j];
        r.c[k] = -inv0 * acc;
    }
    return r;
}

SSeries SSeries::exp() const {
    SSeries nil = *this;
    Cx c0 = nil.c[0];
    nil.c[0] = 0;
    SSeries term = SSeries::one(order());
    SSeries sum = term;
    for (int k = 1; k <= order(); ++k) {
        term = Cx(1.0 / k) * (term * nil);
        sum = sum + term;
    }
    return std::exp(c0) * sum;
}

Cx SSeries::eval(Cx hbar) const {
    Cx r = 0, p = 1;
    for (Cx v : c) { r += p * v; p *= hbar; }
    return r;
}

double SSeries::norm() const {
    double n = 0;
    for (Cx v : c) n = std::max(n, std::abs(v));
    return n;
}

}  // namespace casmon
