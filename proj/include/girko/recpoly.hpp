#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "girko/complex_matrix.hpp"
#include "girko/densela.hpp"

namespace girko {

// Maclaurin coefficients c_0..c_K of an analytic function at 0.
// For q_n the sign convention is c_k = (-1)^k P_k^{(n)}, so that
// q_n(z) = sum c_k z^k matches 1 + sum (-z)^k P_k^{(n)}.
struct CoefficientSeries {
    std::vector<cplx> coeffs;

    std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

inline nlohmann::json to_json(const CoefficientSeries& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& c : s.coeffs) arr.push_back({c.real(), c.imag()});
    return arr;
}

inline CoefficientSeries series_from_json(const nlohmann::json& j) {
    CoefficientSeries s;
    for (const auto& pair : j) s.coeffs.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return s;
}

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double v = 1.0;
    for (std::size_t i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

// Determinant of the principal submatrix on the index set idx.
inline cplx principal_minor(const ComplexMatrix& a, const std::vector<std::size_t>& idx) {
    const std::size_t k = idx.size();
    std::vector<cplx> sub(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub[i * k + j] = a(idx[i], idx[j]);
    return determinant(ComplexMatrix(k, std::move(sub)));
}

} // namespace detail

// Coefficients of q_n by direct principal-minor sums:
// c_k = (-1)^k n^{-k/2} sum_{|I|=k} det(A(I)). An oracle for small sizes;
// refuses when any C(n,k), k <= kmax, exceeds 10^6 subsets.
inline CoefficientSeries minor_sum_coeffs(const ComplexMatrix& a, int kmax) {
    const std::size_t n = a.n();
    if (kmax < 1 || static_cast<std::size_t>(kmax) > n)
        throw std::invalid_argument("minor_sum_coeffs: need 1 <= kmax <= n");
    for (int k = 1; k <= kmax; ++k)
        if (detail::binomial(n, static_cast<std::size_t>(k)) > 1e6)
            throw std::runtime_error("minor_sum_coeffs: C(" + std::to_string(n) + "," +
                                     std::to_string(k) + ") exceeds the 10^6 subset budget");

    CoefficientSeries s;
    s.coeffs.assign(static_cast<std::size_t>(kmax) + 1, cplx(0.0));
    s.coeffs[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        std::vector<std::size_t> idx(kk);
        for (std::size_t i = 0; i < kk; ++i) idx[i] = i;
        cplx sum = 0.0;
        while (true) {
            sum += detail::principal_minor(a, idx);
            // next combination in lexicographic order
            std::size_t i = kk;
            while (i > 0 && idx[i - 1] == n - kk + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < kk; ++j) idx[j] = idx[j - 1] + 1;
        }
        const double norm = std::pow(static_cast<double>(n), -0.5 * k);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s.coeffs[kk] = sign * norm * sum;
    }
    return s;
}

// Coefficients of exp(-sum_k t_k z^k / k) from the normalized traces
// t_k = Tr((A/sqrt(n))^k), via the Newton-identity recurrence
// c_k = -(1/k) sum_{j=1..k} t_j c_{k-j}.
inline CoefficientSeries newton_coeffs(std::span<const cplx> traces) {
    if (traces.empty()) throw std::invalid_argument("newton_coeffs: need at least one trace");
    CoefficientSeries s;
    const std::size_t kmax = traces.size();
    s.coeffs.assign(kmax + 1, cplx(0.0));
    s.coeffs[0] = 1.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += traces[j - 1] * s.coeffs[k - j];
        s.coeffs[k] = -acc / static_cast<double>(k);
    }
    return s;
}

// Horner evaluation of sum c_k z^k.
inline cplx eval_series(const CoefficientSeries& s, cplx z) {
    cplx acc = 0.0;
    for (std::size_t i = s.coeffs.size(); i-- > 0;) acc = acc * z + s.coeffs[i];
    return acc;
}

// q_n coefficients to order kmax from a computed spectrum of A (unscaled):
// the normalized traces are the power sums of the eigenvalues of A/sqrt(n).
inline CoefficientSeries qn_series_from_spectrum(const Spectrum& spec, std::size_t n, int kmax) {
    std::vector<cplx> scaled(spec.eigenvalues);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (cplx& l : scaled) l *= inv_sqrt_n;
    const std::vector<cplx> sums = power_sums(scaled, kmax);
    return newton_coeffs(sums);
}

// q_n(z) = det(1 - z A / sqrt(n)) evaluated directly.
inline cplx qn_determinant(const ComplexMatrix& a, cplx z) {
    const std::size_t n = a.n();
    const cplx f = -z / std::sqrt(static_cast<double>(n));
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = f * a(i, j) + (i == j ? cplx(1.0) : cplx(0.0));
    return determinant(m);
}

} // namespace girko
