#include "casmon/report.hpp"

namespace casmon {

double VerificationReport::worst_margin() const {
    double w = 0;
    for (const auto& c : checks) w = std::max(w, c.tolerance > 0 ? c.residual / c.tolerance : c.residual);
    return w;
}

Json VerificationReport::to_json() const {
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json j{{"identity", c.identity}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
        if (!c.params.empty()) j["params"] = c.params;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int a = 0; a < m.rows(); ++a) {
        Json row = Json::array();
        for (int b = 0; b < m.cols(); ++b) row.push_back({m(a, b).real(), m(a, b).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j) {
    int r = int(j.size()), c = int(j.at(0).size());
    Mat m(r, c);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < c; ++b) m(a, b) = Cx(j.at(a).at(b).at(0).get<double>(), j.at(a).at(b).at(1).get<double>());
    return m;
}

Json series_to_json(const Series& s) {
    Json arr = Json::array();
    for (int k = 0; k <= s.order(); ++k) arr.push_back(matrix_to_json(s[k]));
    return arr;
}

}  // namespace casmon
