#ifndef CASMON_CORE_HPP
#define CASMON_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace casmon {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline const Cx kI{0.0, 1.0};

// All library errors derive from this; `code` is a stable machine-readable tag.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg) : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

inline double mat_norm(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// exp(M) by scaling and squaring with a plain Taylor core; adequate for the
// moderate norms this library produces.
inline Mat expm(const Mat& m) {
    double n = mat_norm(m);
    int s = 0;
    while (n > 0.5) { n /= 2; ++s; }
    Mat x = m / std::pow(2.0, s);
    Mat term = Mat::Identity(m.rows(), m.cols());
    Mat sum = term;
    for (int k = 1; k < 40; ++k) {
        term = term * x / double(k);
        sum += term;
        if (mat_norm(term) < 1e-18 * (1 + mat_norm(sum))) break;
    }
    for (int k = 0; k < s; ++k) sum = sum * sum;
    return sum;
}

}  // namespace casmon

#endif
