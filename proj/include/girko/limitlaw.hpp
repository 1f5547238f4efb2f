#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "girko/recpoly.hpp"
#include "girko/seed.hpp"

namespace girko {

// One realization of the Gaussian coefficients X_1..X_K of the limit object.
struct LimitSample {
    cplx tau;
    std::vector<cplx> X;

    std::size_t order() const { return X.size(); }
};

// Deterministic factor kappa(z) = sqrt(1 - tau z^2), branch with kappa(0) = 1.
// 1 - tau z^2 stays in the right half plane for |z| < 1, |tau| <= 1, so the
// principal square root is the continuous branch.
inline cplx kappa(cplx tau, cplx z) {
    if (!(std::abs(z) < 1.0)) throw std::invalid_argument("kappa: need |z| < 1");
    return std::exp(0.5 * std::log(cplx(1.0) - tau * z * z));
}

// Smallest K with tail bound r^{2K} / (K (1 - r^2)) <= tol for the series
// sum_{k>K} r^{2k}/k.
inline std::size_t min_truncation_order(double radius, double tol) {
    if (!(radius >= 0.0 && radius < 1.0)) throw std::invalid_argument("min_truncation_order: need 0 <= r < 1");
    if (radius == 0.0) return 1;
    const double r2 = radius * radius;
    double tail = r2 / (1.0 - r2);
    std::size_t k = 1;
    while (tail / static_cast<double>(k) > tol && k < 100000) {
        ++k;
        tail *= r2;
    }
    return k;
}

// Independent complex Gaussians with E[X_k] = 0, E[|X_k|^2] = 1 and
// E[X_k^2] = tau^k: write tau^k = r e^{2 i phi} and set
// X_k = e^{i phi} (U + i V) with var(U) = (1+r)/2, var(V) = (1-r)/2.
inline LimitSample sample_limit_coeffs(cplx tau, std::size_t kmax, SeedSpec seed) {
    if (kmax < 1) throw std::invalid_argument("sample_limit_coeffs: need K >= 1");
    std::mt19937_64 gen = make_stream(seed);
    LimitSample out;
    out.tau = tau;
    out.X.reserve(kmax);
    cplx tau_pow = 1.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        tau_pow *= tau;
        const double r = std::min(std::abs(tau_pow), 1.0);
        const double phi = tau_pow == cplx(0.0) ? 0.0 : 0.5 * std::arg(tau_pow);
        const double su = std::sqrt(0.5 * (1.0 + r));
        const double sv = std::sqrt(std::max(0.5 * (1.0 - r), 0.0));
        const cplx uv(su * gaussian(gen), sv * gaussian(gen));
        out.X.push_back(std::polar(1.0, phi) * uv);
    }
    return out;
}

// Truncated F(z) = sum_{k<=K} X_k z^k / sqrt(k). Refuses when the truncation
// tail variance at |z| exceeds 10^-8.
inline cplx eval_F(const LimitSample& sample, cplx z, double tail_tol = 1e-8) {
    const double r = std::abs(z);
    if (!(r < 1.0)) throw std::invalid_argument("eval_F: need |z| < 1");
    const std::size_t required = min_truncation_order(r, tail_tol);
    if (sample.order() < required)
        throw std::runtime_error("eval_F: truncation order " + std::to_string(sample.order()) +
                                 " too small at |z| = " + std::to_string(r) + "; need K >= " +
                                 std::to_string(required));
    cplx acc = 0.0;
    cplx zp = 1.0;
    for (std::size_t k = 1; k <= sample.order(); ++k) {
        zp *= z;
        acc += sample.X[k - 1] * zp / std::sqrt(static_cast<double>(k));
    }
    return acc;
}

// mean_k = tau^{k/2} for even k, 0 for odd k.
inline std::vector<cplx> mean_sequence(cplx tau, std::size_t kmax) {
    std::vector<cplx> means(kmax, cplx(0.0));
    cplx tau_pow = 1.0;
    for (std::size_t k = 2; k <= kmax; k += 2) {
        tau_pow *= tau;
        means[k - 1] = tau_pow;
    }
    return means;
}

// Maclaurin coefficients of kappa e^{-F}: the limit of the normalized traces
// is sqrt(k) X_k + mean_k, fed through the same recurrence as finite n.
inline CoefficientSeries limit_coeffs(const LimitSample& sample, const std::vector<cplx>& means,
                                      std::size_t kmax) {
    if (sample.order() < kmax || means.size() < kmax)
        throw std::invalid_argument("limit_coeffs: sample/means shorter than requested order");
    std::vector<cplx> pseudo_traces(kmax);
    for (std::size_t k = 1; k <= kmax; ++k)
        pseudo_traces[k - 1] = std::sqrt(static_cast<double>(k)) * sample.X[k - 1] + means[k - 1];
    return newton_coeffs(pseudo_traces);
}

// kappa(z) exp(-F(z)); never zero on the disc.
inline cplx eval_limit(const LimitSample& sample, cplx z, double tail_tol = 1e-8) {
    return kappa(sample.tau, z) * std::exp(-eval_F(sample, z, tail_tol));
}

inline nlohmann::json to_json(const LimitSample& s) {
    nlohmann::json x = nlohmann::json::array();
    for (const cplx& v : s.X) x.push_back({v.real(), v.imag()});
    return nlohmann::json{{"tau", {s.tau.real(), s.tau.imag()}},
                          {"K", s.order()},
                          {"X", std::move(x)}};
}

inline LimitSample limit_sample_from_json(const nlohmann::json& j) {
    LimitSample s;
    s.tau = cplx(j.at("tau").at(0).get<double>(), j.at("tau").at(1).get<double>());
    for (const auto& pair : j.at("X")) s.X.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return s;
}

} // namespace girko
