#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "girko/complex_matrix.hpp"
#include "girko/seed.hpp"

namespace girko {

// A sampleable entry law with mean zero and unit variance. `tau` is E[a^2],
// `moment(p, q)` gives E[a^p conj(a)^q] where declared finite (nullopt when
// the moment is infinite or beyond the declared order), and
// `truncated_mean(M)` gives E[a 1_{|a| < M}].
struct EntryDistribution {
    std::string id;
    cplx tau;
    bool is_bounded = false;
    double bound = 0.0;
    std::function<std::optional<cplx>(int, int)> moment;
    std::function<cplx(double)> truncated_mean;
    std::function<cplx(std::mt19937_64&)> draw;
};

namespace detail {

inline double double_factorial_odd(int m) {
    // (m - 1)!! for even m
    double v = 1.0;
    for (int i = m - 1; i > 1; i -= 2) v *= i;
    return v;
}

inline double factorial(int m) {
    double v = 1.0;
    for (int i = 2; i <= m; ++i) v *= i;
    return v;
}

// Symmetric real law with density proportional to min(1, |x|^{-3.2}),
// rescaled to unit variance. Finite variance, infinite fourth moment:
// the tail index 2.2 keeps E[x^2] finite while E[x^4] diverges.
struct HeavyTail {
    static constexpr double kExponent = 3.2;         // density |x|^-kExponent beyond 1
    static constexpr double kTailIndex = kExponent - 1.0;
    static constexpr double kCoreMass = 11.0 / 32.0; // density value c = 1/Z, Z = 32/11
    static constexpr double kTailMass = 5.0 / 32.0;  // each side

    static double scale() { return std::sqrt(3.0 / 11.0); } // unit variance factor

    static double draw(std::mt19937_64& gen) {
        const double v = uniform01(gen) - 0.5;
        double x;
        if (std::abs(v) <= kCoreMass) {
            x = v / kCoreMass;
        } else {
            double p = 0.5 - std::abs(v);
            if (p < 1e-12) p = 1e-12;
            x = std::copysign(std::pow(kTailMass / p, 1.0 / kTailIndex), v);
        }
        return scale() * x;
    }
};

} // namespace detail

// Built-in entry laws. Ids are the stable CLI tokens.
inline const std::vector<EntryDistribution>& builtin_distributions() {
    static const std::vector<EntryDistribution> dists = [] {
        std::vector<EntryDistribution> v;
        const auto zero_mean = [](double) { return cplx(0.0); };

        {
            EntryDistribution d;
            d.id = "complex_gaussian";
            d.tau = 0.0;
            d.moment = [](int p, int q) -> std::optional<cplx> {
                if (p < 0 || q < 0) return std::nullopt;
                if (p != q) return cplx(0.0);
                return cplx(detail::factorial(p));
            };
            d.truncated_mean = zero_mean;
            d.draw = [](std::mt19937_64& g) {
                const double inv_sqrt2 = 0.7071067811865475244;
                return cplx(gaussian(g) * inv_sqrt2, gaussian(g) * inv_sqrt2);
            };
            v.push_back(std::move(d));
        }
        {
            EntryDistribution d;
            d.id = "real_gaussian";
            d.tau = 1.0;
            d.moment = [](int p, int q) -> std::optional<cplx> {
                if (p < 0 || q < 0) return std::nullopt;
                const int m = p + q;
                if (m % 2 != 0) return cplx(0.0);
                return cplx(detail::double_factorial_odd(m));
            };
            d.truncated_mean = zero_mean;
            d.draw = [](std::mt19937_64& g) { return cplx(gaussian(g), 0.0); };
            v.push_back(std::move(d));
        }
        {
            EntryDistribution d;
            d.id = "rademacher";
            d.tau = 1.0;
            d.is_bounded = true;
            d.bound = 1.0;
            d.moment = [](int p, int q) -> std::optional<cplx> {
                if (p < 0 || q < 0) return std::nullopt;
                return cplx((p + q) % 2 == 0 ? 1.0 : 0.0);
            };
            d.truncated_mean = zero_mean;
            d.draw = [](std::mt19937_64& g) { return cplx((g() & 1u) ? 1.0 : -1.0, 0.0); };
            v.push_back(std::move(d));
        }
        {
            EntryDistribution d;
            d.id = "complex_rademacher";
            d.tau = 0.0;
            d.is_bounded = true;
            d.bound = 1.0;
            d.moment = [](int p, int q) -> std::optional<cplx> {
                if (p < 0 || q < 0) return std::nullopt;
                // a = exp(i(pi/4 + j pi/2)); E[a^p conj(a)^q] = (-1)^{(p-q)/4} when 4 | p-q
                const int diff = p - q;
                if (diff % 4 != 0) return cplx(0.0);
                return cplx(((diff / 4) % 2 != 0) ? -1.0 : 1.0);
            };
            d.truncated_mean = zero_mean;
            d.draw = [](std::mt19937_64& g) {
                const double h = 0.7071067811865475244;
                switch (g() & 3u) {
                    case 0: return cplx(h, h);
                    case 1: return cplx(-h, h);
                    case 2: return cplx(-h, -h);
                    default: return cplx(h, -h);
                }
            };
            v.push_back(std::move(d));
        }
        {
            EntryDistribution d;
            d.id = "heavy4";
            d.tau = 1.0;
            d.moment = [](int p, int q) -> std::optional<cplx> {
                if (p < 0 || q < 0) return std::nullopt;
                const int m = p + q;
                if (m >= 4) return std::nullopt; // infinite fourth moment
                if (m % 2 != 0) return cplx(0.0);
                return cplx(1.0); // E[a^0] = E[a^2] = 1
            };
            d.truncated_mean = zero_mean;
            d.draw = [](std::mt19937_64& g) { return cplx(detail::HeavyTail::draw(g), 0.0); };
            v.push_back(std::move(d));
        }
        return v;
    }();
    return dists;
}

inline const EntryDistribution* find_distribution(const std::string& id) {
    for (const EntryDistribution& d : builtin_distributions())
        if (d.id == id) return &d;
    return nullptr;
}

inline std::vector<std::string> distribution_ids() {
    std::vector<std::string> ids;
    for (const EntryDistribution& d : builtin_distributions()) ids.push_back(d.id);
    return ids;
}

// n x n matrix of iid draws, row-major; pure function of (dist, n, seed).
inline ComplexMatrix sample_matrix(const EntryDistribution& dist, std::size_t n, SeedSpec seed) {
    if (n < 1) throw std::invalid_argument("sample_matrix: n must be >= 1");
    std::mt19937_64 gen = make_stream(seed);
    ComplexMatrix m(n);
    for (cplx& e : m.data()) e = dist.draw(gen);
    return m;
}

// Entrywise a 1_{|a| < M} - E[a 1_{|a| < M}].
inline ComplexMatrix truncate_matrix(const ComplexMatrix& a, const EntryDistribution& dist,
                                     double truncation) {
    if (!(truncation > 0.0)) throw std::invalid_argument("truncate_matrix: M must be positive");
    const cplx centering = dist.truncated_mean(truncation);
    ComplexMatrix out(a.n());
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const cplx e = a.data()[i];
        out.data()[i] = (std::abs(e) < truncation ? e : cplx(0.0)) - centering;
    }
    return out;
}

} // namespace girko
