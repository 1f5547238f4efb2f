#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "girko/densela.hpp"
#include "girko/ensemble.hpp"
#include "girko/limitlaw.hpp"
#include "girko/recpoly.hpp"

namespace girko {

struct ExperimentConfig {
    std::string dist_id = "complex_gaussian";
    std::vector<std::size_t> n_values;
    int trials = 0;
    std::uint64_t master_seed = 0;
    std::vector<cplx> z_grid;
    int terms = 0; // q_n series truncation order; 0 = automatic
    std::string out_path;
    int workers = 1;
    double epsilon = 0.1;
};

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (cfg.n_values.empty()) throw std::invalid_argument("config: need at least one n");
    if (!std::is_sorted(cfg.n_values.begin(), cfg.n_values.end()))
        throw std::invalid_argument("config: n values must be sorted ascending");
    for (std::size_t n : cfg.n_values)
        if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    for (const cplx& z : cfg.z_grid)
        if (std::abs(z) > 0.9) throw std::invalid_argument("config: grid points must satisfy |z| <= 0.9");
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (!find_distribution(cfg.dist_id))
        throw std::invalid_argument("config: unknown distribution id '" + cfg.dist_id + "'");
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json grid = nlohmann::json::array();
    for (const cplx& z : cfg.z_grid) grid.push_back({z.real(), z.imag()});
    return nlohmann::json{{"dist", cfg.dist_id},   {"n", cfg.n_values}, {"trials", cfg.trials},
                          {"seed", cfg.master_seed}, {"z", std::move(grid)}, {"terms", cfg.terms},
                          {"out", cfg.out_path},   {"workers", cfg.workers}, {"eps", cfg.epsilon}};
}

// One Monte Carlo observation.
struct TrialRecord {
    std::uint64_t trial = 0;
    std::size_t n = 0;
    std::string dist;
    std::uint64_t seed = 0;
    double rho = 0.0;
    double sigma = 0.0;
    bool converged = true;
    double wall_ms = 0.0;
    std::vector<cplx> q; // q_n at the grid points
};

struct TestReport {
    std::string statistic;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
};

inline nlohmann::json to_json(const TestReport& r) {
    return nlohmann::json{{"statistic", r.statistic}, {"value", r.value},
                          {"threshold", r.threshold}, {"pass", r.pass},
                          {"n_x", r.n_x},             {"n_y", r.n_y}};
}

// Sup distance between the empirical CDFs of two samples.
inline double ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= v) ++i;
        while (j < ys.size() && ys[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

// Large-sample two-sided KS null quantile at level alpha.
inline double ks_threshold(std::size_t nx, std::size_t ny, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(static_cast<double>(nx + ny) /
                         (static_cast<double>(nx) * static_cast<double>(ny)));
}

struct Exceedance {
    double fraction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t count = 0;
    std::size_t total = 0;
};

// Fraction of trials with |rho - 1| >= eps, with a 95% Wilson interval.
inline Exceedance estimate_exceedance(const std::vector<double>& rhos, double eps) {
    if (rhos.empty()) throw std::invalid_argument("estimate_exceedance: empty input");
    Exceedance e;
    e.total = rhos.size();
    for (double r : rhos)
        if (std::abs(r - 1.0) >= eps) ++e.count;
    const double n = static_cast<double>(e.total);
    const double p = static_cast<double>(e.count) / n;
    e.fraction = p;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    e.ci_low = e.count == 0 ? 0.0 : std::max(0.0, center - half);
    e.ci_high = e.count == e.total ? 1.0 : std::min(1.0, center + half);
    return e;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty input");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Writes CSV lines in trial order no matter the completion order.
class OrderedCsvSink {
public:
    OrderedCsvSink(const std::string& path, const std::string& header) {
        if (!path.empty()) {
            out_.open(path);
            if (!out_) throw std::runtime_error("cannot open output file: " + path);
            out_ << header << '\n';
        }
    }
    void put(std::size_t index, std::string line) {
        if (!out_.is_open()) return;
        std::lock_guard<std::mutex> lock(mu_);
        pending_.emplace(index, std::move(line));
        while (!pending_.empty() && pending_.begin()->first == next_) {
            out_ << pending_.begin()->second << '\n';
            pending_.erase(pending_.begin());
            ++next_;
        }
        out_.flush();
    }

private:
    std::ofstream out_;
    std::mutex mu_;
    std::map<std::size_t, std::string> pending_;
    std::size_t next_ = 0;
};

template <class Fn>
inline void parallel_for(std::size_t count, int workers, Fn fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nthreads = std::min<int>(workers, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (std::thread& th : pool) th.join();
}

} // namespace detail

inline std::string csv_header(std::size_t grid_points) {
    std::string h = "trial,n,dist,seed,rho,sigma,converged,wall_ms";
    for (std::size_t i = 0; i < grid_points; ++i)
        h += ",q_re_" + std::to_string(i) + ",q_im_" + std::to_string(i);
    return h;
}

inline std::string csv_line(const TrialRecord& r) {
    std::string line = std::to_string(r.trial) + ',' + std::to_string(r.n) + ',' + r.dist + ',' +
                       std::to_string(r.seed) + ',' + detail::fmt17(r.rho) + ',' +
                       detail::fmt17(r.sigma) + ',' + (r.converged ? "1" : "0") + ',' +
                       detail::fmt17(r.wall_ms);
    for (const cplx& q : r.q) line += ',' + detail::fmt17(q.real()) + ',' + detail::fmt17(q.imag());
    return line;
}

inline std::vector<TrialRecord> read_csv(std::istream& in) {
    std::vector<TrialRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() < 8) throw std::runtime_error("malformed CSV row: " + line);
        TrialRecord r;
        r.trial = std::stoull(fields[0]);
        r.n = std::stoull(fields[1]);
        r.dist = fields[2];
        r.seed = std::stoull(fields[3]);
        r.rho = std::stod(fields[4]);
        r.sigma = std::stod(fields[5]);
        r.converged = fields[6] == "1";
        r.wall_ms = std::stod(fields[7]);
        for (std::size_t i = 8; i + 1 < fields.size() + 1 && i + 1 < fields.size() + 1; i += 2) {
            if (i + 1 >= fields.size()) break;
            r.q.emplace_back(std::stod(fields[i]), std::stod(fields[i + 1]));
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<TrialRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    return read_csv(in);
}

namespace detail {

// Truncation order for evaluating q_n on the grid: full degree for small n,
// tail-rule truncation otherwise.
inline int qn_terms(const ExperimentConfig& cfg, std::size_t n) {
    if (cfg.terms > 0) return cfg.terms;
    if (cfg.z_grid.empty()) return static_cast<int>(std::min<std::size_t>(n, 8));
    double rmax = 0.0;
    for (const cplx& z : cfg.z_grid) rmax = std::max(rmax, std::abs(z));
    const std::size_t tail_k = min_truncation_order(rmax, 1e-12);
    if (n <= 64) return static_cast<int>(std::max<std::size_t>(n, tail_k));
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(tail_k, 8)));
}

} // namespace detail

// Samples A, computes rho_n and sigma_n of A/sqrt(n) and q_n on the grid,
// one record per (n, trial); deterministic given master_seed regardless of
// worker count. Fails if >= 1% of eigensolves do not converge.
inline std::vector<TrialRecord> run_radius_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    const EntryDistribution& dist = *find_distribution(cfg.dist_id);
    const std::size_t total = cfg.n_values.size() * static_cast<std::size_t>(cfg.trials);
    std::vector<TrialRecord> records(total);
    detail::OrderedCsvSink sink(cfg.out_path, csv_header(cfg.z_grid.size()));

    detail::parallel_for(total, cfg.workers, [&](std::size_t idx) {
        const std::size_t n = cfg.n_values[idx / static_cast<std::size_t>(cfg.trials)];
        const auto start = std::chrono::steady_clock::now();
        const SeedSpec seed{cfg.master_seed, idx};
        const ComplexMatrix a = sample_matrix(dist, n, seed);
        const Spectrum spec = eigenvalues(a);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
        const OperatorNormResult on = operator_norm_info(a);

        TrialRecord r;
        r.trial = idx;
        r.n = n;
        r.dist = cfg.dist_id;
        r.seed = derived_seed(seed);
        r.rho = spectral_radius(spec) * inv_sqrt_n;
        r.sigma = on.value * inv_sqrt_n;
        r.converged = spec.converged && on.converged;
        if (!cfg.z_grid.empty()) {
            const CoefficientSeries qs =
                qn_series_from_spectrum(spec, n, detail::qn_terms(cfg, n));
            for (const cplx& z : cfg.z_grid) r.q.push_back(eval_series(qs, z));
        }
        r.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start).count();
        sink.put(idx, csv_line(r));
        records[idx] = std::move(r);
    });

    std::size_t failed = 0;
    for (const TrialRecord& r : records)
        if (!r.converged) ++failed;
    if (failed * 100 >= total && failed > 0)
        throw std::runtime_error("run_radius_sweep: " + std::to_string(failed) + "/" +
                                 std::to_string(total) + " trials failed to converge");
    return records;
}

struct QnPointReport {
    cplx z;
    TestReport re, im, mod;
};

struct QnReport {
    std::vector<QnPointReport> points;
    TestReport min_modulus;
    bool pass = false;
    double max_degree_violation = 0.0; // Newton coefficients beyond degree n
    std::size_t trials_qn = 0;
    std::size_t trials_limit = 0;
};

inline nlohmann::json to_json(const QnReport& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const QnPointReport& p : r.points)
        pts.push_back({{"z", {p.z.real(), p.z.imag()}},
                       {"re", to_json(p.re)},
                       {"im", to_json(p.im)},
                       {"mod", to_json(p.mod)}});
    return nlohmann::json{{"points", std::move(pts)},
                          {"min_modulus", to_json(r.min_modulus)},
                          {"pass", r.pass},
                          {"max_degree_violation", r.max_degree_violation},
                          {"trials_qn", r.trials_qn},
                          {"trials_limit", r.trials_limit}};
}

// Compares the law of q_n on the grid against the limit kappa e^{-F} by
// two-sample KS on the Re/Im/modulus marginals, plus the min of the modulus
// over the grid. `alpha` sets the null quantile used as threshold.
inline QnReport run_qn_convergence(const ExperimentConfig& cfg, double alpha = 0.001) {
    validate(cfg);
    if (cfg.n_values.size() != 1)
        throw std::invalid_argument("run_qn_convergence: exactly one n expected");
    if (cfg.z_grid.empty()) throw std::invalid_argument("run_qn_convergence: empty grid");
    if (cfg.trials < 200)
        throw std::invalid_argument("run_qn_convergence: need at least 200 trials per side");
    const EntryDistribution& dist = *find_distribution(cfg.dist_id);
    const std::size_t n = cfg.n_values[0];
    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t npts = cfg.z_grid.size();

    double rmax = 0.0;
    for (const cplx& z : cfg.z_grid) rmax = std::max(rmax, std::abs(z));
    const std::size_t limit_order = min_truncation_order(rmax, 1e-8);

    std::vector<std::vector<cplx>> qn_vals(trials), lim_vals(trials);
    std::vector<double> degree_violation(trials, 0.0);

    detail::parallel_for(trials, cfg.workers, [&](std::size_t t) {
        const ComplexMatrix a = sample_matrix(dist, n, SeedSpec{cfg.master_seed, t});
        std::vector<cplx>& out = qn_vals[t];
        out.reserve(npts);
        if (n <= 64) {
            const Spectrum spec = eigenvalues(a);
            const int terms = detail::qn_terms(cfg, n);
            const CoefficientSeries qs = qn_series_from_spectrum(spec, n, terms);
            for (std::size_t k = n + 1; k < qs.coeffs.size(); ++k)
                degree_violation[t] = std::max(degree_violation[t], std::abs(qs.coeffs[k]));
            for (const cplx& z : cfg.z_grid) out.push_back(eval_series(qs, z));
        } else {
            // at large n a per-point pivoted determinant is the cheap route
            for (const cplx& z : cfg.z_grid) out.push_back(qn_determinant(a, z));
        }
    });
    detail::parallel_for(trials, cfg.workers, [&](std::size_t t) {
        const LimitSample s =
            sample_limit_coeffs(dist.tau, limit_order, SeedSpec{cfg.master_seed, (1ull << 32) + t});
        std::vector<cplx>& out = lim_vals[t];
        out.reserve(npts);
        for (const cplx& z : cfg.z_grid) out.push_back(eval_limit(s, z));
    });

    QnReport report;
    report.trials_qn = trials;
    report.trials_limit = trials;
    for (double v : degree_violation)
        report.max_degree_violation = std::max(report.max_degree_violation, v);
    const double thr = ks_threshold(trials, trials, alpha);
    bool all_pass = true;

    const auto make_report = [&](const std::string& name, std::vector<double> xs,
                                 std::vector<double> ys) {
        TestReport r;
        r.statistic = name;
        r.value = ks_two_sample(std::move(xs), std::move(ys));
        r.threshold = thr;
        r.pass = r.value < thr;
        r.n_x = trials;
        r.n_y = trials;
        all_pass = all_pass && r.pass;
        return r;
    };

    for (std::size_t p = 0; p < npts; ++p) {
        std::vector<double> xr, xi, xm, yr, yi, ym;
        xr.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            xr.push_back(qn_vals[t][p].real());
            xi.push_back(qn_vals[t][p].imag());
            xm.push_back(std::abs(qn_vals[t][p]));
            yr.push_back(lim_vals[t][p].real());
            yi.push_back(lim_vals[t][p].imag());
            ym.push_back(std::abs(lim_vals[t][p]));
        }
        QnPointReport pr;
        pr.z = cfg.z_grid[p];
        const std::string tag = "z" + std::to_string(p);
        pr.re = make_report("ks_re_" + tag, std::move(xr), std::move(yr));
        pr.im = make_report("ks_im_" + tag, std::move(xi), std::move(yi));
        pr.mod = make_report("ks_mod_" + tag, std::move(xm), std::move(ym));
        report.points.push_back(std::move(pr));
    }
    {
        std::vector<double> xmin, ymin;
        for (std::size_t t = 0; t < trials; ++t) {
            double mx = 1e300, my = 1e300;
            for (std::size_t p = 0; p < npts; ++p) {
                mx = std::min(mx, std::abs(qn_vals[t][p]));
                my = std::min(my, std::abs(lim_vals[t][p]));
            }
            xmin.push_back(mx);
            ymin.push_back(my);
        }
        report.min_modulus = make_report("ks_min_modulus", std::move(xmin), std::move(ymin));
    }
    report.pass = all_pass;
    return report;
}

} // namespace girko
