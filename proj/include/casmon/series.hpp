#ifndef CASMON_SERIES_HPP
#define CASMON_SERIES_HPP

#include "casmon/core.hpp"

namespace casmon {

// Truncated power series in hbar with complex-matrix coefficients.
// Arithmetic is exact truncation at the fixed order; a series of order 0
// is a plain matrix, which is how fixed-hbar (numeric) computations are run
// through the same code paths as formal ones.
class Series {
  public:
    Series() = default;
    Series(int order, int dim) : c_(order + 1, Mat::Zero(dim, dim)) {}
    static Series constant(int order, const Mat& m);
    static Series identity(int order, int dim);
    static Series scalar(int order, int dim, Cx v) { return constant(order, v * Mat::Identity(dim, dim)); }

    int order() const { return int(c_.size()) - 1; }
    int dim() const { return c_.empty() ? 0 : int(c_[0].rows()); }
    bool empty() const { return c_.empty(); }

    const Mat& operator[](int k) const { return c_[k]; }
    Mat& operator[](int k) { return c_[k]; }

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator*(Cx s, Series a);
    Series operator-() const { return Cx(-1) * (*this); }

    // Multiply by hbar^k (shift coefficients up, dropping overflow).
    Series shifted(int k) const;
    Series truncated(int new_order) const;

    Series inverse() const;   // requires invertible order-0 coefficient
    Series exp() const;       // scaling-and-squaring over the truncated ring
    Series transpose() const;
    Series conj_by(const Mat& p, const Mat& pinv) const;  // p * X * pinv per order

    double norm() const;          // max over coefficients of entrywise max-abs
    Mat eval(Cx hbar) const;      // sum c_k hbar^k
    Cx trace_coeff(int k) const { return c_[k].trace(); }

    bool same_shape(const Series& o) const { return order() == o.order() && dim() == o.dim(); }

  private:
    std::vector<Mat> c_;
};

Series kron_series(const Series& a, const Series& b);  // tensor product in the ring

// power(M, logz; order, hbar_weight): exp(logz * hbar^w * M) in the ring.
// With w=1 this is the formal z^{hbar M}; with w=0 a plain z^M.
Series power_of(const Mat& m, Cx logz, int order, int hbar_weight);

// Deformation scale. Connections carry the coefficient nu with hbar = pi*i*nu;
// exponential normalizations (R-matrices, local monodromies, q) use hbar.
// Formal mode works in the hbar-series ring; numeric mode fixes hbar.
struct Scale {
    bool formal = true;
    int order = 4;
    Cx hbar = Cx(0.1, 0);

    int ring_order() const { return formal ? order : 0; }
    Cx nu() const { return hbar / (kPi * kI); }
    // nu * m as a ring element
    Series nu_times(const Mat& m) const {
        Series s(ring_order(), int(m.rows()));
        if (formal) s[1] = m / (kPi * kI);
        else s[0] = nu() * m;
        return s;
    }
    Series hbar_times(const Mat& m) const {
        Series s(ring_order(), int(m.rows()));
        if (formal) s[1] = m;
        else s[0] = hbar * m;
        return s;
    }
    // z^{nu m} with an explicit log determination
    Series nu_power(const Mat& m, Cx logz) const {
        return formal ? power_of(m / (kPi * kI), logz, order, 1) : Series::constant(0, expm(nu() * logz * m));
    }
    Series hbar_power(const Mat& m, Cx logz) const {
        return formal ? power_of(m, logz, order, 1) : Series::constant(0, expm(hbar * logz * m));
    }
};

// Scalar (1x1-like) series utilities used by the quantum side.
struct SSeries {
    std::vector<Cx> c;  // c[k] = coefficient of hbar^k
    explicit SSeries(int order = 0) : c(order + 1, Cx(0)) {}
    static SSeries one(int order) { SSeries s(order); s.c[0] = 1; return s; }
    static SSeries var(int order) { SSeries s(order); if (order >= 1) s.c[1] = 1; return s; }
    int order() const { return int(c.size()) - 1; }
    friend SSeries operator+(const SSeries& a, const SSeries& b);
    friend SSeries operator-(const SSeries& a, const SSeries& b);
    friend SSeries operator*(const SSeries& a, const SSeries& b);
    friend SSeries operator*(Cx s, SSeries a);
    SSeries inverse() const;
    SSeries exp() const;    // requires c[0]'s exponential: exp(c0)*exp(rest)
    Cx eval(Cx hbar) const;
    double norm() const;
};

}  // namespace casmon

#endif
