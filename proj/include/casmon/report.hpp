#ifndef CASMON_REPORT_HPP
#define CASMON_REPORT_HPP

#include "casmon/series.hpp"

#include <json.hpp>

namespace casmon {

using Json = nlohmann::json;

// One verified identity: name, residual, tolerance, verdict.
struct Check {
    std::string identity;
    double residual = 0;
    double tolerance = 0;
    bool pass = false;
    Json params;
};

struct VerificationReport {
    std::vector<Check> checks;

    void add(const std::string& name, double residual, double tol, Json params = Json::object()) {
        checks.push_back({name, residual, tol, residual < tol, std::move(params)});
    }
    void merge(const VerificationReport& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    double worst_margin() const;
    Json to_json() const;
};

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Json series_to_json(const Series& s);

}  // namespace casmon

#endif
