// Batch front-end: every command runs a named verification suite and writes a
// JSON result record. Exit code 0 = all identities pass, 1 = a computation or
// identity failed, 2 = invalid configuration.

#include <CLI11.hpp>

#include "casmon/fusion.hpp"
#include "casmon/qgroup.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace casmon;

namespace {

struct Config {
    std::string command;
    std::string algebra = "sl2";
    std::string rep = "V1";
    std::string kind = "dynkz";
    int order = 3;
    double hbar_re = 0.1, hbar_im = 0.0;
    bool formal = true;
    double tol = 1e-7;
    int mns = 0;
    std::string word = "1";
    std::string route = "both";
    std::string out;
    std::string cache_dir;
    std::string format = "json";
    std::string rep_file;

    Json to_json() const {
        return Json{{"command", command}, {"algebra", algebra},   {"rep", rep},       {"kind", kind},
                    {"order", order},     {"hbar", {hbar_re, hbar_im}}, {"formal", formal}, {"tol", tol},
                    {"mns", mns},         {"word", word},         {"route", route},   {"rep_file", rep_file}};
    }
};

unsigned long long fnv1a(const std::string& s) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Representation build_rep(const Config& cfg) {
    if (!cfg.rep_file.empty()) return rep_from_file(cfg.rep_file);
    if (cfg.algebra == "sl2") {
        if (cfg.rep.size() >= 2 && cfg.rep[0] == 'V') return sl2_irrep(std::stoi(cfg.rep.substr(1)));
        throw Error("ConfigInvalid", "sl2 reps are V0, V1, V2, ...");
    }
    if (cfg.algebra == "sl3" || cfg.algebra == "a2") return sln_defining(3);
    if (cfg.algebra == "sl4" || cfg.algebra == "a3") return sln_defining(4);
    throw Error("ConfigInvalid", "algebra must be sl2, a2/sl3 or a3/sl4");
}

Scale build_scale(const Config& cfg) {
    Scale sc;
    sc.formal = cfg.formal;
    sc.order = cfg.order;
    sc.hbar = Cx(cfg.hbar_re, cfg.hbar_im);
    return sc;
}

Vec chamber_mu(const Representation& rep) {
    int r = rep.rs->rank();
    Vec mu(r);
    for (int k = 0; k < r; ++k) mu(k) = Cx(0, 1.3 - 0.15 * k);  // interior chamber point
    return mu;
}

BraidWord parse_word(const std::string& w) {
    BraidWord out;
    std::string cur;
    for (char c : w + ",") {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.letters.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

VerificationReport run_associator(const Config& cfg) {
    VerificationReport rep;
    auto v1 = build_rep(cfg);
    Scale sc = build_scale(cfg);
    Series phi = kz_associator(v1, v1, v1, sc);
    Series phi2 = kz_associator(v1, v1, v1, sc, 0.4);
    rep.add("probe independence", (phi - phi2).norm(), cfg.tol);
    rep.add("unit at order zero", mat_norm(phi[0] - Mat::Identity(phi.dim(), phi.dim())), 1e-12);
    if (sc.formal && sc.order >= 1) rep.add("vanishing first order", mat_norm(phi[1]), 1e-10);
    auto v0 = trivial_rep(v1.rs);
    Series phi_eps = kz_associator(v1, v0, v1, sc);
    rep.add("counit slot", (phi_eps - Series::identity(sc.ring_order(), phi_eps.dim())).norm(), 1e-10);

    auto vv = tensor({v1, v1});
    Series lhs = kz_associator(v1, v1, vv, sc) * kz_associator(vv, v1, v1, sc);
    Series p1 = kz_associator(v1, v1, v1, sc);
    int d = v1.dim;
    Series phi_x_1(sc.ring_order(), d * d * d * d), one_x_phi(sc.ring_order(), d * d * d * d);
    for (int k = 0; k <= sc.ring_order(); ++k) {
        phi_x_1[k] = kron(p1[k], Mat::Identity(d, d));
        one_x_phi[k] = kron(Mat::Identity(d, d), p1[k]);
    }
    Series rhs = one_x_phi * kz_associator(v1, vv, v1, sc) * phi_x_1;
    rep.add("pentagon", (lhs - rhs).norm(), cfg.tol);
    return rep;
}

VerificationReport run_flatness(const Config& cfg) {
    auto v = build_rep(cfg);
    auto vv = tensor({v, v});
    Tensors t(vv);
    Scale sc = build_scale(cfg);
    sc.formal = false;
    ConnKind kind = cfg.kind == "casimir" ? ConnKind::CasimirK
                    : cfg.kind == "casimirc" ? ConnKind::CasimirC
                    : cfg.kind == "kz" ? ConnKind::KZ
                                       : ConnKind::DynKZ;
    auto conn = build_connection(kind, vv, t, sc);
    return verify_flatness(conn, t, 50, 2024, cfg.tol, 1e-12);
}

VerificationReport run_dcp(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    Tensors t(v);
    Scale sc = build_scale(cfg);
    auto ctx = make_dcp(v, t, sc, false);
    int m = int(ctx.fam.mns.size());
    std::vector<std::unique_ptr<FundamentalSolution>> sols;
    for (int i = 0; i < m; ++i) sols.push_back(std::make_unique<FundamentalSolution>(ctx, i, 1e-11));
    std::vector<std::vector<Series>> phi(m, std::vector<Series>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) phi[a][b] = dcp_associator(ctx, *sols[a], *sols[b], 1e-11);
    double trans = 0, weight = 0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) trans = std::max(trans, (phi[a][c] - phi[a][b] * phi[b][c]).norm());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < v.rs->rank(); ++i)
                for (int k = 0; k <= sc.ring_order(); ++k)
                    weight = std::max(weight, mat_norm(commutator(v.h[i], phi[a][b][k])));
    rep.add("transitivity", trans, cfg.tol, {{"mns_count", m}});
    rep.add("support weight zero", weight, cfg.tol);
    return rep;
}

VerificationReport run_monodromy(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    Tensors t(v);
    Scale sc = build_scale(cfg);
    auto ctx = make_dcp(v, t, sc, cfg.kind != "casimir");
    BraidMonodromy mon(ctx, cfg.mns, 1e-11);
    BraidWord w = parse_word(cfg.word);
    Series pw = mon.word(w);
    rep.add("word evaluated", 0.0, 1.0, {{"norm", pw.norm()}});
    if (v.rs->rank() == 2) {
        Series s1 = mon.generator(0), s2 = mon.generator(1);
        int m = Diagram::from_root_system(*v.rs).label(0, 1);
        Series lhs = Series::identity(sc.ring_order(), v.dim), rhs = lhs;
        for (int k = 0; k < m; ++k) {
            lhs = lhs * ((k % 2 == 0) ? s1 : s2);
            rhs = rhs * ((k % 2 == 0) ? s2 : s1);
        }
        rep.add("braid relation", (lhs - rhs).norm(), cfg.tol);
    }
    Series g = mon.generator(0), gi = mon.generator(0, -1);
    rep.add("inverse generator", (g * gi - Series::identity(sc.ring_order(), v.dim)).norm(), cfg.tol);
    return rep;
}

VerificationReport run_fusion(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    auto vv = tensor({v, v});
    Tensors t(vv);
    Scale sc = build_scale(cfg);
    FusionContext fc{&vv, &t, sc, 0, chamber_mu(v)};
    JSolution j1 = fusion_j2(fc, Cx(1.5, 0), +1);
    rep.add("anchor error", j1.anchor_error, cfg.tol);
    JSolution j2 = fusion_j2(fc, Cx(1.5, 0), +1, AnchorParams{40.0, 14, 1e-12});
    rep.add("anchor independence", (j1.h - j2.h).norm(), cfg.tol);
    return rep;
}

VerificationReport run_twist(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    auto vv = tensor({v, v});
    Tensors t(vv);
    Scale sc = build_scale(cfg);
    FusionContext fc{&vv, &t, sc, 0, chamber_mu(v)};
    TwistResult tw = differential_twist(fc, +1);
    rep.add("z independence", tw.z_independence, cfg.tol);
    rep.add("unit at order zero", mat_norm(tw.value[0] - Mat::Identity(vv.dim, vv.dim)), 1e-10);
    return rep;
}

VerificationReport run_centraliser(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    Scale sc = build_scale(cfg);
    bool both = cfg.route == "both";
    auto res = centraliser_constant(v, v, sc, 0, chamber_mu(v), 0, +1, AnchorParams{}, both);
    if (both) rep.add("route agreement", res.route_disagreement, cfg.tol);
    rep.add("unit at order zero", mat_norm(res.relative_twist[0] - Mat::Identity(v.dim * v.dim, v.dim * v.dim)), 1e-10);
    return rep;
}

VerificationReport run_qcqtqba(const Config& cfg) {
    auto v = build_rep(cfg);
    Scale sc = build_scale(cfg);
    return assemble_qcqtqba(v, sc, chamber_mu(v), cfg.tol, 1e-10);
}

VerificationReport run_quantum(const Config& cfg) {
    VerificationReport rep;
    auto v = build_rep(cfg);
    Scale sc = build_scale(cfg);
    sc.formal = false;
    auto q = q_deform(v, sc);
    rep.add("quantum relations", q.relation_residual(), 1e-10);
    if (v.rs->rank() == 2) {
        Series s1 = quantum_weyl(q, 0, false), s2 = quantum_weyl(q, 1, false);
        rep.add("braid relation", (s1 * s2 * s1 - s2 * s1 * s2).norm(), 1e-10);
    }
    Series s = quantum_weyl(q, 0, cfg.kind != "kappa");
    rep.add("squares lemma", mat_norm(s[0] * s[0] - squares_rhs(q, 0, cfg.kind != "kappa", sc.hbar)), 1e-10);
    return rep;
}

VerificationReport run_equivalence(const Config& cfg) {
    auto v = build_rep(cfg);
    EquivalenceOptions opt;
    opt.order = cfg.order;
    opt.variant_c = cfg.kind != "kappa";
    opt.tol_series = cfg.tol;
    opt.tol_numeric = cfg.tol;
    std::vector<BraidWord> words{parse_word(cfg.word)};
    return monodromy_equivalence(v, words, opt);
}

int run_command(const Config& cfg, std::ostream& log) {
    std::string cache_dir = cfg.cache_dir;
    if (cache_dir.empty())
        if (const char* env = std::getenv("CASMON_CACHE")) cache_dir = env;
    std::string key = cfg.to_json().dump();
    std::string cache_path;
    if (!cache_dir.empty()) {
        cache_path = cache_dir + "/casmon-" + std::to_string(fnv1a(key)) + ".json";
        std::ifstream in(cache_path);
        if (in) {
            std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            if (!cfg.out.empty()) {
                std::ofstream o(cfg.out, std::ios::binary);
                o << bytes;
            } else {
                log << bytes;
            }
            Json j = Json::parse(bytes);
            return j.at("pass").get<bool>() ? 0 : 1;
        }
    }

    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    try {
        if (cfg.command == "associator") rep = run_associator(cfg);
        else if (cfg.command == "flatness") rep = run_flatness(cfg);
        else if (cfg.command == "dcp") rep = run_dcp(cfg);
        else if (cfg.command == "monodromy") rep = run_monodromy(cfg);
        else if (cfg.command == "fusion") rep = run_fusion(cfg);
        else if (cfg.command == "twist") rep = run_twist(cfg);
        else if (cfg.command == "centraliser") rep = run_centraliser(cfg);
        else if (cfg.command == "qcqtqba") rep = run_qcqtqba(cfg);
        else if (cfg.command == "quantum") rep = run_quantum(cfg);
        else if (cfg.command == "equivalence") rep = run_equivalence(cfg);
        else throw Error("ConfigInvalid", "unknown command " + cfg.command);
    } catch (const Error& e) {
        if (e.code == "ConfigInvalid") throw;
        Json record{{"command", cfg.command}, {"config", cfg.to_json()}, {"error", e.what()}, {"pass", false}};
        std::string bytes = record.dump(2) + "\n";
        if (!cfg.out.empty()) {
            std::ofstream o(cfg.out, std::ios::binary);
            o << bytes;
        } else {
            log << bytes;
        }
        return 1;
    }
    auto t1 = std::chrono::steady_clock::now();

    Json record{{"command", cfg.command},
                {"config", cfg.to_json()},
                {"report", rep.to_json()},
                {"pass", rep.all_pass()},
                {"elapsed_ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
                {"version", "casmon 1.0"}};
    std::string bytes;
    if (cfg.format == "csv") {
        bytes = "identity,residual,tolerance,pass\n";
        for (const auto& c : rep.checks)
            bytes += c.identity + "," + std::to_string(c.residual) + "," + std::to_string(c.tolerance) + "," +
                     (c.pass ? "true" : "false") + "\n";
    } else {
        bytes = record.dump(2) + "\n";
    }
    if (!cache_path.empty() && cfg.format == "json") {
        std::ofstream c(cache_path, std::ios::binary);
        c << bytes;
    }
    if (!cfg.out.empty()) {
        std::ofstream o(cfg.out, std::ios::binary);
        if (!o) throw Error("IOError", "cannot write " + cfg.out);
        o << bytes;
    } else {
        log << bytes;
    }
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification suites for flat connections, associators, twists and quantum Weyl operators"};
    Config cfg;
    app.require_subcommand(1);
    std::vector<std::string> names{"associator", "flatness", "dcp",     "monodromy", "fusion",
                                   "twist",      "centraliser", "qcqtqba", "quantum",   "equivalence"};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--algebra", cfg.algebra, "sl2, a2/sl3, a3/sl4");
        sub->add_option("--rep", cfg.rep, "module label (V0, V1, ... for sl2)");
        sub->add_option("--rep-file", cfg.rep_file, "JSON file with generator matrices");
        sub->add_option("--kind", cfg.kind, "connection kind or operator variant");
        sub->add_option("--order", cfg.order, "series truncation order")->check(CLI::Range(0, 8));
        sub->add_option("--hbar", cfg.hbar_re, "numeric hbar (real part)");
        sub->add_option("--hbar-im", cfg.hbar_im, "numeric hbar (imaginary part)");
        sub->add_flag("!--numeric", cfg.formal, "fixed-hbar mode instead of series mode");
        sub->add_option("--tol", cfg.tol, "main tolerance");
        sub->add_option("--mns", cfg.mns, "maximal nested set index");
        sub->add_option("--word", cfg.word, "braid word, comma separated (negative = inverse)");
        sub->add_option("--route", cfg.route, "both | asymptotic");
        sub->add_option("--out", cfg.out, "output path");
        sub->add_option("--cache-dir", cfg.cache_dir, "cache directory (or env CASMON_CACHE)");
        sub->add_option("--format", cfg.format, "json | csv");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands()[0]->get_name();
    try {
        return run_command(cfg, std::cout);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code == "ConfigInvalid" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
