// girkolab: Monte Carlo experiments on the spectral radius and the
// reciprocal characteristic polynomial of iid random matrices.
//
// Subcommands: radius, qn, moments, minorcheck. All randomness flows from
// --seed; every run echoes its resolved configuration as JSON to stderr.
// Exit codes: 0 success, 2 usage/validation error, 3 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "girko/experiments.hpp"
#include "girko/momentcomb.hpp"
#include "girko/recpoly.hpp"

namespace {

using girko::cplx;

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

// "0.5", "0.5+0.2i", "-0.3i", "0.5-0.2i"
cplx parse_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    std::string body = s;
    bool has_i = false;
    if (body.back() == 'i' || body.back() == 'j') {
        has_i = true;
        body.pop_back();
    }
    // split at the last +/- that is not an exponent sign and not leading
    std::size_t cut = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    try {
        if (!has_i) return cplx(std::stod(body), 0.0);
        if (cut == std::string::npos) {
            if (body.empty() || body == "+") return cplx(0.0, 1.0);
            if (body == "-") return cplx(0.0, -1.0);
            return cplx(0.0, std::stod(body));
        }
        const double re = std::stod(body.substr(0, cut));
        std::string im = body.substr(cut);
        if (im == "+") im = "1";
        if (im == "-") im = "-1";
        return cplx(re, std::stod(im));
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse complex literal '" + s + "'");
    }
}

struct CommonFlags {
    std::string dist = "complex_gaussian";
    std::string n_list = "64";
    int trials = 10;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string z_list;
    int terms = 0;
    std::string out;
    int workers = 1;
    double eps = 0.1;
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool wants_z) {
    cmd->add_option("--dist", f.dist, "entry distribution id");
    cmd->add_option("--n", f.n_list, "comma-separated matrix sizes");
    cmd->add_option("--trials", f.trials, "trials per n");
    cmd->add_option("--seed", f.seed, "master seed (required)")->each([&f](const std::string&) {
        f.seed_set = true;
    });
    if (wants_z) {
        cmd->add_option("--z", f.z_list, "comma-separated grid points, e.g. 0.3,0.5+0.2i");
        cmd->add_option("--terms", f.terms, "series truncation order (0 = automatic)");
    }
    cmd->add_option("--out", f.out, "CSV output path");
    cmd->add_option("--workers", f.workers, "worker thread count");
    cmd->add_option("--eps", f.eps, "exceedance threshold for |rho - 1|");
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
}

girko::ExperimentConfig resolve_config(const CommonFlags& f, const CLI::App* cmd) {
    girko::ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + f.config_path);
        nlohmann::json j;
        in >> j;
        if (j.contains("dist")) cfg.dist_id = j["dist"].get<std::string>();
        if (j.contains("n")) cfg.n_values = j["n"].get<std::vector<std::size_t>>();
        if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
        if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("terms")) cfg.terms = j["terms"].get<int>();
        if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("eps")) cfg.epsilon = j["eps"].get<double>();
        if (j.contains("z"))
            for (const auto& pair : j["z"]) cfg.z_grid.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    } else {
        cfg.dist_id = f.dist;
        cfg.n_values.clear();
    }
    const auto overridden = [&](const std::string& flag) {
        return f.config_path.empty() || cmd->count(flag) > 0;
    };
    if (overridden("--dist")) cfg.dist_id = f.dist;
    if (overridden("--n")) {
        cfg.n_values.clear();
        for (const std::string& tok : split_commas(f.n_list))
            cfg.n_values.push_back(static_cast<std::size_t>(std::stoull(tok)));
    }
    if (overridden("--trials")) cfg.trials = f.trials;
    if (f.seed_set) cfg.master_seed = f.seed;
    if (cmd->count("--terms") > 0) cfg.terms = f.terms;
    if (overridden("--out")) cfg.out_path = f.out;
    if (overridden("--workers")) cfg.workers = f.workers;
    if (overridden("--eps")) cfg.epsilon = f.eps;
    if (cmd->count("--z") > 0 || (f.config_path.empty() && !f.z_list.empty())) {
        cfg.z_grid.clear();
        for (const std::string& tok : split_commas(f.z_list)) cfg.z_grid.push_back(parse_complex(tok));
    }
    if (!f.seed_set && (f.config_path.empty() || cfg.master_seed == 0))
        throw std::invalid_argument("--seed is required (no wall-clock seeding)");
    return cfg;
}

void echo_config(const std::string& cmd_name, const nlohmann::json& j) {
    nlohmann::json wrapped = j;
    wrapped["command"] = cmd_name;
    std::cerr << wrapped.dump() << '\n';
}

int cmd_radius(const CommonFlags& f, const CLI::App* cmd) {
    girko::ExperimentConfig cfg;
    try {
        cfg = resolve_config(f, cmd);
        echo_config("radius", girko::to_json(cfg));
        girko::validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\nvalid distributions:";
        for (const std::string& id : girko::distribution_ids()) std::cerr << ' ' << id;
        std::cerr << '\n';
        return 2;
    }
    try {
        const std::vector<girko::TrialRecord> records = girko::run_radius_sweep(cfg);
        nlohmann::json summary;
        summary["per_n"] = nlohmann::json::array();
        for (std::size_t n : cfg.n_values) {
            std::vector<double> rhos, sigmas;
            std::size_t failed = 0;
            for (const girko::TrialRecord& r : records) {
                if (r.n != n) continue;
                if (!r.converged) { ++failed; continue; }
                rhos.push_back(r.rho);
                sigmas.push_back(r.sigma);
            }
            const girko::Exceedance ex = girko::estimate_exceedance(rhos, cfg.epsilon);
            std::vector<double> dev;
            for (double r : rhos) dev.push_back(std::abs(r - 1.0));
            summary["per_n"].push_back({{"n", n},
                                        {"median_rho", girko::median(rhos)},
                                        {"median_sigma", girko::median(sigmas)},
                                        {"median_abs_rho_minus_1", girko::median(dev)},
                                        {"exceedance", ex.fraction},
                                        {"exceedance_ci", {ex.ci_low, ex.ci_high}},
                                        {"failed", failed}});
        }
        std::cout << summary.dump(2) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

int cmd_qn(const CommonFlags& f, const CLI::App* cmd) {
    girko::ExperimentConfig cfg;
    try {
        cfg = resolve_config(f, cmd);
        echo_config("qn", girko::to_json(cfg));
        girko::validate(cfg);
        if (cfg.z_grid.empty()) throw std::invalid_argument("--z is required");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        const girko::QnReport report = girko::run_qn_convergence(cfg);
        std::cout << girko::to_json(report).dump(2) << '\n';
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

struct MomentFlags {
    std::string ks;
    std::string signs;
    std::size_t n = 4;
    std::string dist = "rademacher";
    std::string mode; // "exact", "wick", or empty for both
};

int cmd_moments(const MomentFlags& f) {
    girko::MomentQuery query;
    const girko::EntryDistribution* dist = nullptr;
    try {
        for (const std::string& tok : split_commas(f.ks)) query.ks.push_back(std::stoi(tok));
        for (const std::string& tok : split_commas(f.signs)) {
            if (tok == "p") query.signs.push_back(girko::Sign::plain);
            else if (tok == "c") query.signs.push_back(girko::Sign::conj);
            else throw std::invalid_argument("sign must be p or c, got '" + tok + "'");
        }
        girko::validate(query);
        dist = girko::find_distribution(f.dist);
        if (!dist) throw std::invalid_argument("unknown distribution id '" + f.dist + "'");
        if (!f.mode.empty() && f.mode != "exact" && f.mode != "wick")
            throw std::invalid_argument("--mode must be exact or wick");
        nlohmann::json cfg{{"ks", query.ks}, {"n", f.n}, {"dist", f.dist}, {"mode", f.mode}};
        nlohmann::json signs = nlohmann::json::array();
        for (girko::Sign s : query.signs) signs.push_back(s == girko::Sign::plain ? "p" : "c");
        cfg["signs"] = std::move(signs);
        echo_config("moments", cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        nlohmann::json out;
        out["query"] = {{"ks", query.ks}};
        cplx exact{}, wick{};
        if (f.mode != "wick") {
            exact = girko::exact_trace_moment(query, f.n, *dist);
            out["n"] = f.n;
            out["exact"] = {exact.real(), exact.imag()};
        }
        if (f.mode != "exact") {
            wick = girko::wick_limit_moment(query, dist->tau);
            out["wick"] = {wick.real(), wick.imag()};
        }
        if (f.mode.empty()) out["abs_error"] = std::abs(exact - wick);
        std::cout << out.dump(2) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

struct MinorFlags {
    std::size_t n = 6;
    int kmax = 0;
    std::string dist = "complex_gaussian";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_minorcheck(const MinorFlags& f) {
    const girko::EntryDistribution* dist = girko::find_distribution(f.dist);
    girko::ComplexMatrix a(1);
    int kmax = f.kmax > 0 ? f.kmax : static_cast<int>(f.n);
    try {
        if (!dist) throw std::invalid_argument("unknown distribution id '" + f.dist + "'");
        if (!f.seed_set) throw std::invalid_argument("--seed is required (no wall-clock seeding)");
        echo_config("minorcheck",
                    nlohmann::json{{"n", f.n}, {"kmax", kmax}, {"dist", f.dist}, {"seed", f.seed}});
        a = girko::sample_matrix(*dist, f.n, girko::SeedSpec{f.seed, 0});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    girko::CoefficientSeries minors;
    try {
        minors = girko::minor_sum_coeffs(a, kmax);
    } catch (const std::exception& e) {
        // budget refusal is a usage problem (n too large for the oracle route)
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        const girko::Spectrum spec = girko::eigenvalues(a);
        const girko::CoefficientSeries newton = girko::qn_series_from_spectrum(spec, f.n, kmax);
        double worst = 0.0;
        for (std::size_t k = 0; k < minors.coeffs.size(); ++k)
            worst = std::max(worst, std::abs(minors.coeffs[k] - newton.coeffs[k]));
        nlohmann::json out{{"n", f.n},
                           {"kmax", kmax},
                           {"max_abs_diff", worst},
                           {"minor_sum", girko::to_json(minors)},
                           {"newton", girko::to_json(newton)}};
        std::cout << out.dump(2) << '\n';
        if (worst > 1e-8) {
            std::cerr << "error: coefficient routes disagree by " << worst << '\n';
            return 3;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-matrix spectral radius and reciprocal characteristic polynomial lab"};
    app.require_subcommand(1);

    CommonFlags radius_flags, qn_flags;
    MomentFlags moment_flags;
    MinorFlags minor_flags;

    CLI::App* radius = app.add_subcommand("radius", "spectral radius / operator norm sweep");
    add_common(radius, radius_flags, true);

    CLI::App* qn = app.add_subcommand("qn", "q_n vs limit-law distributional comparison");
    add_common(qn, qn_flags, true);

    CLI::App* moments = app.add_subcommand("moments", "exact vs Wick-limit trace moments");
    moments->add_option("--ks", moment_flags.ks, "comma-separated cycle lengths, e.g. 1,2,2")->required();
    moments->add_option("--signs", moment_flags.signs, "comma-separated p|c, e.g. p,c,p")->required();
    moments->add_option("--n", moment_flags.n, "matrix size for the exact side");
    moments->add_option("--dist", moment_flags.dist, "entry distribution id");
    moments->add_option("--mode", moment_flags.mode, "exact|wick (both when omitted)");

    CLI::App* minorcheck = app.add_subcommand("minorcheck", "minor-sum vs Newton coefficient identity");
    minorcheck->add_option("--n", minor_flags.n, "matrix size");
    minorcheck->add_option("--kmax", minor_flags.kmax, "coefficient order (default n)");
    minorcheck->add_option("--dist", minor_flags.dist, "entry distribution id");
    minorcheck->add_option("--seed", minor_flags.seed, "master seed (required)")
        ->each([&](const std::string&) { minor_flags.seed_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (radius->parsed()) return cmd_radius(radius_flags, radius);
    if (qn->parsed()) return cmd_qn(qn_flags, qn);
    if (moments->parsed()) return cmd_moments(moment_flags);
    if (minorcheck->parsed()) return cmd_minorcheck(minor_flags);
    return 2;
}
