#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casmon/liealg.hpp"
#include "casmon/report.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace casmon;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
int run(const std::string& args) { return std::system(("./casmon " + args + " > /dev/null 2>&1").c_str()); }
int code(int status) { return WEXITSTATUS(status); }
}  // namespace

TEST_CASE("exit codes: pass, config error") {
    CHECK(code(run("quantum --algebra sl2 --rep V1 --numeric --hbar 0.1")) == 0);
    CHECK(code(run("quantum --algebra sl2 --rep V1 --order -3")) == 2);
    CHECK(code(run("nonsense")) == 2);
    CHECK(code(run("associator --algebra so8")) == 2);
}

TEST_CASE("twist command reports z-independence and writes a record") {
    int st = run("twist --algebra sl2 --rep V1 --order 2 --tol 1e-7 --out cli_twist.json");
    CHECK(code(st) == 0);
    Json j = Json::parse(slurp("cli_twist.json"));
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("command") == "twist");
    bool found = false;
    for (const auto& c : j.at("report"))
        if (c.at("identity") == "z independence") found = true;
    CHECK(found);
}

TEST_CASE("cache returns byte-identical records") {
    std::system("rm -rf cli_cache && mkdir -p cli_cache");
    int st1 = run("quantum --algebra a2 --numeric --hbar 0.1 --cache-dir cli_cache --out cli_q1.json");
    int st2 = run("quantum --algebra a2 --numeric --hbar 0.1 --cache-dir cli_cache --out cli_q2.json");
    CHECK(code(st1) == 0);
    CHECK(code(st2) == 0);
    CHECK(slurp("cli_q1.json") == slurp("cli_q2.json"));
    CHECK(!slurp("cli_q1.json").empty());
}

TEST_CASE("csv summary has one row per identity") {
    int st = run("quantum --algebra a2 --numeric --hbar 0.05 --format csv --out cli_q.csv");
    CHECK(code(st) == 0);
    std::string csv = slurp("cli_q.csv");
    CHECK(csv.rfind("identity,residual,tolerance,pass", 0) == 0);
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows >= 3);
}

TEST_CASE("equivalence command runs the comparator end to end") {
    CHECK(code(run("equivalence --algebra sl2 --rep V1 --order 2 --word 1 --tol 1e-5")) == 0);
}

TEST_CASE("external rep file: B2 spin module loads and its invariants hold") {
    auto rep = rep_from_file(SOURCE_DIR "/tests/data/b2_spin.json");
    CHECK(rep.dim == 4);
    CHECK(rep.rs->num_positive() == 4);
    CHECK(rep.relation_residual() < 1e-12);
    // short roots have squared length 2, the long simple root 4
    CHECK(rep.rs->simple_norm2(0) == doctest::Approx(4.0));
    CHECK(rep.rs->simple_norm2(1) == doctest::Approx(2.0));
    Tensors t(rep);
    // Casimir acts as a scalar on the irreducible spin module
    Mat cas = t.casimir(3u);
    CHECK(mat_norm(cas - cas(0, 0) * Mat::Identity(4, 4)) < 1e-12);

    // corrupted generators are rejected with the failing relation reported
    CHECK_THROWS_WITH_AS(rep_from_file(SOURCE_DIR "/tests/data/b2_broken.json"), doctest::Contains("RelationViolation"),
                         Error);
}
