#include "rmatch/exemplars.hpp"
#include "rmatch/io.hpp"
#include "rmatch/matching.hpp"
#include "rmatch/mcsim.hpp"
#include "rmatch/sbfamily.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace rmatch;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitNoMatching = 2;
constexpr int kExitDegenerate = 3;

struct CommonArgs {
    std::string family = "doubling";
    std::string alpha = "3/2";
    std::string p = "1/2";
    std::string system_path;
    std::string out_dir;
    std::string format = "csv";
    std::size_t depth_cap = 24;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a, const json& cfg) {
    auto s = [&](const char* key, std::string& slot) {
        if (cfg.contains(key)) slot = cfg[key].get<std::string>();
    };
    s("family", a.family);
    s("alpha", a.alpha);
    s("p", a.p);
    s("system", a.system_path);
    s("out", a.out_dir);
    s("format", a.format);
    if (cfg.contains("depth_cap")) a.depth_cap = cfg["depth_cap"].get<std::size_t>();
    if (cfg.contains("seed")) a.seed = cfg["seed"].get<std::uint64_t>();

    cmd->add_option("--family", a.family, "doubling|cf|beta|custom");
    cmd->add_option("--alpha", a.alpha, "parameter alpha, canonical scalar text");
    cmd->add_option("--p", a.p, "probability p (p0 for cf/beta)");
    cmd->add_option("--system", a.system_path, "JSON system description (family=custom)");
    cmd->add_option("--out", a.out_dir, "output directory (stdout when empty)");
    cmd->add_option("--depth-cap", a.depth_cap, "search depth cap");
    cmd->add_option("--seed", a.seed, "RNG seed (simulate)");
    cmd->add_option("--format", a.format, "csv|json|svg");
}

void emit(const CommonArgs& a, const std::string& name, const std::string& content) {
    if (a.out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(a.out_dir);
    std::string path = a.out_dir + "/" + name;
    write_file(path, content);
    std::cerr << "wrote " << path << "\n";
}

RandomSystem build_system(const CommonArgs& a) {
    if (a.family == "doubling")
        return make_doubling_system({Rational::parse(a.alpha), Rational::parse(a.p)});
    if (a.family == "cf") return cf_system({Rational::parse(a.alpha), Rational::parse(a.p)});
    if (a.family == "beta")
        return beta_system({Scalar::parse(a.alpha), Rational::parse(a.p)});
    if (a.family == "custom") {
        std::ifstream is(a.system_path);
        if (!is) throw parse_error("cannot read " + a.system_path);
        std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        return system_from_json(text);
    }
    throw parse_error("unknown family: " + a.family);
}

std::string cert_summary(const MatchingCertificate& cert) {
    std::ostringstream os;
    os << "c=" << cert.c.str() << "  M=" << cert.M << "  Y={";
    for (std::size_t i = 0; i < cert.y_set.size(); ++i)
        os << (i ? ", " : "") << cert.y_set[i].str();
    os << "}  strong=" << (cert.strong ? "yes" : "no");
    for (const auto& b : cert.balance)
        os << "\n    y=" << b.y.str() << "  sum-=" << b.sum_minus.str()
           << "  sum+=" << b.sum_plus.str() << (b.equal ? "  (equal)" : "  (UNEQUAL)");
    return os.str();
}

int cmd_match(const CommonArgs& a) {
    if (a.family == "doubling") {
        DoublingParams params(Rational::parse(a.alpha), Rational::parse(a.p));
        auto cls = m_alpha(params.alpha);
        if (cls.kind == MAlphaResult::Cycle) {
            std::cout << "no matching: deterministic orbit of 1 cycles {";
            for (std::size_t i = 0; i < cls.cycle.size(); ++i)
                std::cout << (i ? ", " : "") << cls.cycle[i].str();
            std::cout << "} (Markov parameter)\n";
            return kExitNoMatching;
        }
        if (cls.kind == MAlphaResult::Unresolved) {
            std::cout << "unresolved within cap\n";
            return kExitNoMatching;
        }
        RandomSystem sys = make_doubling_system(params);
        SearchOptions opt;
        opt.m_max = std::min<std::size_t>(a.depth_cap, cls.m_alpha + 1);
        json all = json::array();
        for (const auto& c : sys.critical_points()) {
            auto res = find_matching(sys, c, opt);
            if (auto* cert = std::get_if<MatchingCertificate>(&res)) {
                std::cout << cert_summary(*cert) << "\n";
                all.push_back(json::parse(cert->to_json()));
                if (cert->crossed_critical) return kExitDegenerate;
            } else {
                const auto& nm = std::get<NoMatchingWithinDepth>(res);
                std::cout << "c=" << c.str() << "  " << nm.note << "\n";
                return nm.degenerate ? kExitDegenerate : kExitNoMatching;
            }
        }
        emit(a, "certificates.json", all.dump(2) + "\n");
        return kExitOk;
    }
    if (a.family == "cf") {
        CFParams params(Rational::parse(a.alpha), Rational::parse(a.p));
        auto certs = cf_certificates(params);
        if (certs.cell.n)
            std::cout << "alpha in J_" << certs.cell.n << ", k=" << certs.cell.k << "\n";
        else
            std::cout << "alpha in the non-strong interval ((sqrt10-2)/2, 2-sqrt2)\n";
        std::cout << "positive critical point:\n  " << cert_summary(certs.positive) << "\n";
        std::cout << "negative critical point:\n  " << cert_summary(certs.negative) << "\n";
        json all = json::array();
        all.push_back(json::parse(certs.positive.to_json()));
        all.push_back(json::parse(certs.negative.to_json()));
        emit(a, "certificates.json", all.dump(2) + "\n");
        return kExitOk;
    }
    if (a.family == "beta") {
        BetaParams params(Scalar::parse(a.alpha), Rational::parse(a.p));
        auto certs = beta_certificates(params);
        json all = json::array();
        for (const auto& cert : certs) {
            std::cout << cert_summary(cert) << "\n";
            all.push_back(json::parse(cert.to_json()));
        }
        emit(a, "certificates.json", all.dump(2) + "\n");
        return kExitOk;
    }
    RandomSystem sys = build_system(a);
    SearchOptions opt;
    opt.m_max = a.depth_cap;
    json all = json::array();
    for (const auto& c : sys.critical_points()) {
        auto res = find_matching(sys, c, opt);
        if (auto* cert = std::get_if<MatchingCertificate>(&res)) {
            std::cout << cert_summary(*cert) << "\n";
            all.push_back(json::parse(cert->to_json()));
        } else {
            const auto& nm = std::get<NoMatchingWithinDepth>(res);
            std::cout << "c=" << c.str() << "  " << nm.note << "\n";
            return nm.degenerate ? kExitDegenerate : kExitNoMatching;
        }
    }
    emit(a, "certificates.json", all.dump(2) + "\n");
    return kExitOk;
}

int cmd_density(const CommonArgs& a) {
    StepDensity f;
    std::string note;
    if (a.family == "doubling") {
        DoublingParams params(Rational::parse(a.alpha), Rational::parse(a.p));
        auto res = doubling_pipeline(params, a.depth_cap);
        f = res.density.f;
        RandomSystem sys = make_doubling_system(params);
        note = "route=" + res.density.route +
               "  transfer_residual=" + transfer_residual(sys, f).str();
    } else if (a.family == "beta") {
        BetaParams params(Scalar::parse(a.alpha), Rational::parse(a.p));
        auto res = beta_density(params);
        f = res.f;
        RandomSystem sys = beta_system(params);
        note = "route=" + res.route + "  transfer_residual=" + transfer_residual(sys, f).str();
    } else if (a.family == "custom") {
        RandomSystem sys = build_system(a);
        DensityResult res;
        try {
            std::vector<MatchingCertificate> certs;
            SearchOptions opt;
            opt.m_max = a.depth_cap;
            for (const auto& c : sys.critical_points()) {
                auto r = find_matching(sys, c, opt);
                auto* cert = std::get_if<MatchingCertificate>(&r);
                if (!cert || !cert->strong) throw structural_error("no strong certificate");
                certs.push_back(std::move(*cert));
            }
            res = density_via_matching(sys, certs);
        } catch (const std::exception&) {
            res = density_via_markov(sys);
        }
        f = res.f;
        note = "route=" + res.route + "  transfer_residual=" + transfer_residual(sys, f).str();
    } else {
        std::cerr << "exact densities are available for doubling/beta/custom affine systems; "
                     "use `simulate` for the cf family\n";
        return kExitNoMatching;
    }
    std::cout << note << "\n";
    emit(a, "density.csv", density_csv(f));
    if (a.format == "svg")
        emit(a, "density.svg", svg_step_plot(f, "invariant density, alpha=" + a.alpha));
    return kExitOk;
}

int cmd_freq(const CommonArgs& a) {
    DoublingParams params(Rational::parse(a.alpha), Rational::parse(a.p));
    auto res = doubling_pipeline(params, a.depth_cap);
    std::cout << "pi0(" << a.alpha << ", " << a.p << ") = " << res.pi0.str() << " = "
              << Scalar(res.pi0).decimal(20) << "  [route=" << res.density.route << "]\n";
    return kExitOk;
}

int cmd_surface(const CommonArgs& a, std::size_t alpha_steps, std::size_t p_steps) {
    std::vector<Rational> alphas, ps;
    for (std::size_t i = 0; i < alpha_steps; ++i)
        alphas.push_back(Rational(1) + Rational(Int(i), Int(alpha_steps - 1)));
    for (std::size_t j = 1; j <= p_steps; ++j)
        ps.push_back(Rational(Int(j), Int(p_steps + 1)));
    auto rows = pi0_surface(alphas, ps, a.depth_cap);
    emit(a, "surface.csv", surface_csv(rows));
    if (a.format == "svg")
        emit(a, "surface.svg", svg_heatmap(rows, "digit-0 frequency pi0(alpha, p)"));
    bool any_fail = false;
    for (const auto& r : rows)
        if (!r.pi0) any_fail = true;
    return any_fail ? kExitNoMatching : kExitOk;
}

int cmd_scan(const CommonArgs& a, const std::string& lo, const std::string& hi) {
    auto scan = scan_matching_intervals(Rational::parse(lo), Rational::parse(hi), a.depth_cap);
    emit(a, "scan.csv", scan_csv(scan));
    std::cerr << scan.intervals.size() << " matching intervals, " << scan.gaps.size()
              << " unresolved gaps\n";
    return kExitOk;
}

int cmd_simulate(const CommonArgs& a, const SimConfig& cfg_in) {
    SimConfig cfg = cfg_in;
    cfg.seed = a.seed;
    FloatSystem fsys;
    const StepDensity* exact = nullptr;
    StepDensity exact_store;
    double alpha_f = Scalar::parse(a.alpha).to_double();
    double p_f = Rational::parse(a.p).to_double();
    if (a.family == "doubling") {
        fsys = float_doubling(alpha_f, p_f);
        try {
            auto res = doubling_pipeline({Rational::parse(a.alpha), Rational::parse(a.p)},
                                         a.depth_cap);
            exact_store = res.density.f;
            exact = &exact_store;
        } catch (const std::exception&) {
            // simulation only
        }
    } else if (a.family == "cf") {
        fsys = float_cf(alpha_f, p_f);
    } else {
        std::cerr << "simulate supports doubling and cf families\n";
        return kExitParse;
    }
    Histogram h = simulate_density(fsys, cfg);
    emit(a, "histogram.csv", histogram_csv(h));
    if (a.format == "svg")
        emit(a, "histogram.svg",
             svg_histogram_overlay(h, exact, "simulated density, alpha=" + a.alpha));
    if (fsys.digit) {
        auto est = birkhoff_pi0(fsys, cfg);
        std::cout << "birkhoff_pi0 = " << est.value << " +- " << est.stderr_ << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    // --config FILE is honored as a defaults source for every subcommand.
    json cfg;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream is(argv[i + 1]);
            if (!is) {
                std::cerr << "cannot read config " << argv[i + 1] << "\n";
                return kExitParse;
            }
            try {
                is >> cfg;
            } catch (const std::exception& e) {
                std::cerr << "bad config: " << e.what() << "\n";
                return kExitParse;
            }
        }
    }

    CLI::App app{"exact matching certificates, invariant densities and digit frequencies "
                 "for random interval maps"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON defaults file")->expected(1);

    CommonArgs margs, dargs, fargs, sargs, scargs, simargs;
    auto* match = app.add_subcommand("match", "matching certificates");
    add_common(match, margs, cfg);
    auto* density = app.add_subcommand("density", "exact invariant density");
    add_common(density, dargs, cfg);
    auto* freq = app.add_subcommand("freq", "exact digit-0 frequency");
    add_common(freq, fargs, cfg);

    auto* surface = app.add_subcommand("surface", "pi0 over an (alpha, p) grid");
    add_common(surface, sargs, cfg);
    std::size_t alpha_steps = cfg.value("alpha_steps", 21);
    std::size_t p_steps = cfg.value("p_steps", 9);
    surface->add_option("--alpha-steps", alpha_steps, "grid points in alpha");
    surface->add_option("--p-steps", p_steps, "grid points in p");

    auto* scan = app.add_subcommand("scan", "matching intervals of [lo, hi]");
    add_common(scan, scargs, cfg);
    std::string lo = cfg.value("lo", "1"), hi = cfg.value("hi", "2");
    scan->add_option("--lo", lo, "left endpoint (rational)");
    scan->add_option("--hi", hi, "right endpoint (rational)");

    auto* simulate = app.add_subcommand("simulate", "seeded Monte-Carlo simulation");
    add_common(simulate, simargs, cfg);
    SimConfig simcfg;
    if (cfg.contains("n_points")) simcfg.n_points = cfg["n_points"].get<std::size_t>();
    if (cfg.contains("n_iterations")) simcfg.n_iterations = cfg["n_iterations"].get<std::size_t>();
    if (cfg.contains("burn_in")) simcfg.burn_in = cfg["burn_in"].get<std::size_t>();
    if (cfg.contains("n_bins")) simcfg.n_bins = cfg["n_bins"].get<std::size_t>();
    simulate->add_option("--points", simcfg.n_points, "independent sample points");
    simulate->add_option("--iters", simcfg.n_iterations, "iterations per point");
    simulate->add_option("--burn-in", simcfg.burn_in, "discarded iterations");
    simulate->add_option("--bins", simcfg.n_bins, "histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitParse : kExitOk;
    }

    try {
        if (match->parsed()) return cmd_match(margs);
        if (density->parsed()) return cmd_density(dargs);
        if (freq->parsed()) return cmd_freq(fargs);
        if (surface->parsed()) return cmd_surface(sargs, alpha_steps, p_steps);
        if (scan->parsed()) return cmd_scan(scargs, lo, hi);
        if (simulate->parsed()) return cmd_simulate(simargs, simcfg);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const degenerate_orbit& e) {
        std::cerr << "degenerate: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoMatching;
    }
    return kExitOk;
}
