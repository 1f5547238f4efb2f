#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "girko/limitlaw.hpp"
#include "girko/momentcomb.hpp"

using girko::cplx;
using girko::ComplexMatrix;
using girko::MomentQuery;
using girko::Sign;

namespace {

ComplexMatrix sample(const std::string& dist, std::size_t n, std::uint64_t seed,
                     std::uint64_t trial = 0) {
    return girko::sample_matrix(*girko::find_distribution(dist), n, {seed, trial});
}

// every +-1 matrix of size n, for brute-force expectations
template <class Fn>
void for_all_sign_matrices(std::size_t n, Fn fn) {
    const std::size_t cells = n * n;
    ComplexMatrix a(n);
    for (std::uint64_t mask = 0; mask < (1ull << cells); ++mask) {
        for (std::size_t c = 0; c < cells; ++c)
            a.data()[c] = (mask >> c) & 1 ? cplx(1.0) : cplx(-1.0);
        fn(a);
    }
}

// t_k of a realized matrix straight from the cycle definition
cplx cycle_sum(const ComplexMatrix& a, int k) {
    cplx t = 0.0;
    for (const auto& cyc : girko::detail::directed_cycles(static_cast<int>(a.n()), k))
        t += girko::detail::cycle_product(a, cyc);
    return t;
}

// Exact finite-n E[r_k] for k <= 4 by walk-class counting: the only closed
// walks with a repeated vertex and even edge pattern are the all-one-vertex
// walk (n of them, worth E[a^k]) and, for k = 4, the doubled 2-cycle
// (n(n-1) of them, worth tau^2). mean_rk keeps only the dominant class.
cplx exact_mean_rk(int k, std::size_t n, const girko::EntryDistribution& d) {
    const double nn = static_cast<double>(n);
    const cplx loop = *d.moment(k, 0) * nn;
    if (k < 4) return loop;
    return loop + nn * (nn - 1.0) * d.tau * d.tau;
}

// all queries with m <= 4 factors and total cycle length <= 6
std::vector<MomentQuery> query_battery() {
    std::vector<MomentQuery> out;
    std::vector<int> ks;
    const auto rec = [&](auto&& self, int remaining) -> void {
        if (!ks.empty()) {
            const std::size_t m = ks.size();
            for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
                MomentQuery q;
                q.ks = ks;
                for (std::size_t i = 0; i < m; ++i)
                    q.signs.push_back((bits >> i) & 1 ? Sign::conj : Sign::plain);
                out.push_back(std::move(q));
            }
        }
        if (ks.size() == 4) return;
        for (int k = 1; k <= remaining; ++k) {
            ks.push_back(k);
            self(self, remaining - k);
            ks.pop_back();
        }
    };
    rec(rec, 6);
    return out;
}

} // namespace

TEST_CASE("split_trace: small k by hand") {
    ComplexMatrix a(2);
    a(0, 0) = cplx(1.0, 0.5);  // a
    a(0, 1) = cplx(-2.0, 1.0); // b
    a(1, 0) = cplx(0.5, -1.5); // c
    a(1, 1) = cplx(3.0, 0.0);  // d

    const girko::TraceSplit s1 = girko::split_trace(a, 1);
    CHECK(s1.t == a.trace());
    CHECK(s1.r == cplx(0.0));

    const girko::TraceSplit s2 = girko::split_trace(a, 2);
    CHECK(std::abs(s2.t - a(0, 1) * a(1, 0)) < 1e-14);
    CHECK(std::abs(s2.r - (a(0, 0) * a(0, 0) + a(1, 1) * a(1, 1))) < 1e-14);

    CHECK_THROWS_AS(girko::split_trace(a, 0), std::invalid_argument);
}

TEST_CASE("split_trace identity Tr(A^k) = k t_k + r_k, k <= 6") {
    for (std::size_t n : {2u, 3u, 4u, 5u, 6u}) {
        const ComplexMatrix a = sample("complex_gaussian", n, 41 + n);
        const std::vector<cplx> traces = girko::traces_of_powers(a, 6);
        for (int k = 1; k <= 6; ++k) {
            if (std::pow(static_cast<double>(n), k) > 1e8) continue;
            const girko::TraceSplit s = girko::split_trace(a, k);
            CAPTURE(n);
            CAPTURE(k);
            CHECK(std::abs(static_cast<double>(k) * s.t + s.r -
                           traces[static_cast<std::size_t>(k) - 1]) < 1e-9);
        }
    }
}

TEST_CASE("split_trace closed forms agree with direct cycle enumeration") {
    for (std::size_t n : {3u, 5u, 7u}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const ComplexMatrix a = sample("complex_gaussian", n, 600 + seed, n);
            for (int k = 2; k <= 4; ++k) {
                const girko::TraceSplit fast = girko::split_trace(a, k);
                const cplx t_ref = cycle_sum(a, k);
                CAPTURE(n);
                CAPTURE(k);
                CHECK(std::abs(fast.t - t_ref) < 1e-9 * (1.0 + std::abs(t_ref)));
            }
        }
    }
}

TEST_CASE("split_trace budget refusal") {
    const ComplexMatrix a = sample("rademacher", 20, 1);
    CHECK_THROWS_AS(girko::split_trace(a, 7), std::runtime_error);
}

TEST_CASE("query validation") {
    MomentQuery q;
    CHECK_THROWS_AS(girko::validate(q), std::invalid_argument);
    q.ks = {1, 2};
    q.signs = {Sign::plain};
    CHECK_THROWS_AS(girko::validate(q), std::invalid_argument);
    q.ks = {0};
    q.signs = {Sign::plain};
    CHECK_THROWS_AS(girko::validate(q), std::invalid_argument);
}

TEST_CASE("exact moments: linear cases for every distribution") {
    for (const girko::EntryDistribution& d : girko::builtin_distributions()) {
        CAPTURE(d.id);
        // E[Tr A / sqrt n] = 0
        CHECK(std::abs(girko::exact_trace_moment({{1}, {Sign::plain}}, 3, d)) < 1e-14);
        // E|Tr A|^2 = n exactly, normalized to 1
        CHECK(std::abs(girko::exact_trace_moment({{1, 1}, {Sign::plain, Sign::conj}}, 4, d) -
                       cplx(1.0)) < 1e-12);
        // E[(Tr A)^2] = n tau
        CHECK(std::abs(girko::exact_trace_moment({{1, 1}, {Sign::plain, Sign::plain}}, 4, d) -
                       d.tau) < 1e-12);
    }
    // four stacked 1-cycles hit E[a^4], which heavy4 declares unavailable
    CHECK_THROWS_AS(
        girko::exact_trace_moment(
            {{1, 1, 1, 1}, {Sign::plain, Sign::plain, Sign::plain, Sign::plain}}, 3,
            *girko::find_distribution("heavy4")),
        std::runtime_error);
}

TEST_CASE("exact moments match brute-force enumeration at n = 2, rademacher") {
    const girko::EntryDistribution& rad = *girko::find_distribution("rademacher");
    const std::vector<MomentQuery> queries = {
        {{1}, {Sign::plain}},
        {{2}, {Sign::plain}},
        {{1, 1}, {Sign::plain, Sign::conj}},
        {{2, 2}, {Sign::plain, Sign::conj}},
        {{1, 2}, {Sign::plain, Sign::plain}},
        {{1, 1, 2}, {Sign::plain, Sign::conj, Sign::plain}},
        {{1, 1, 1, 1}, {Sign::plain, Sign::conj, Sign::plain, Sign::conj}},
    };
    for (const MomentQuery& q : queries) {
        cplx brute = 0.0;
        std::size_t count = 0;
        double norm = 0.0;
        for (int k : q.ks) norm += 0.5 * k;
        for_all_sign_matrices(2, [&](const ComplexMatrix& a) {
            cplx prod = 1.0;
            for (std::size_t i = 0; i < q.ks.size(); ++i) {
                const cplx t = cycle_sum(a, q.ks[i]);
                prod *= q.signs[i] == Sign::conj ? std::conj(t) : t;
            }
            brute += prod;
            ++count;
        });
        brute /= static_cast<double>(count) * std::pow(2.0, norm);
        const cplx got = girko::exact_trace_moment(q, 2, rad);
        CAPTURE(q.ks);
        CHECK(std::abs(got - brute) < 1e-12);
    }
}

TEST_CASE("Wick moments: odd vanishing and the pencil cases") {
    CHECK(girko::wick_limit_moment({{1}, {Sign::plain}}, cplx(0.7)) == cplx(0.0));
    CHECK(girko::wick_limit_moment({{1, 2, 3}, {Sign::plain, Sign::conj, Sign::plain}},
                                   cplx(0.3)) == cplx(0.0));
    CHECK(girko::wick_limit_moment({{1, 1}, {Sign::plain, Sign::conj}}, cplx(0.5, 0.2)) ==
          cplx(1.0));
    CHECK(girko::wick_limit_moment({{2, 2}, {Sign::plain, Sign::conj}}, cplx(0.5, 0.2)) ==
          cplx(0.5));
    // different cycle lengths cannot pair
    CHECK(girko::wick_limit_moment({{1, 2}, {Sign::plain, Sign::conj}}, cplx(1.0)) == cplx(0.0));
    // alternating signs on four 1-cycles: pairings give 1 + |tau|^2 + 1
    for (const cplx tau : {cplx(0.0), cplx(1.0), cplx(0.5, -0.5)}) {
        const cplx got = girko::wick_limit_moment(
            {{1, 1, 1, 1}, {Sign::plain, Sign::conj, Sign::plain, Sign::conj}}, tau);
        CHECK(std::abs(got - (cplx(2.0) + tau * std::conj(tau))) < 1e-14);
    }
}

TEST_CASE("Wick moments match Monte Carlo over the Gaussian coefficient sampler") {
    // independent oracle: average products of X_k / sqrt(k) drawn from the
    // limit-law sampler, which never touches the pair-partition code
    const std::size_t N = 200000;
    const cplx tau(0.5, 0.25);
    const std::vector<MomentQuery> queries = {
        {{1, 1}, {Sign::plain, Sign::plain}},
        {{2, 2}, {Sign::plain, Sign::conj}},
        {{1, 1, 2, 2}, {Sign::plain, Sign::conj, Sign::conj, Sign::plain}},
        {{1, 1, 1, 1}, {Sign::plain, Sign::plain, Sign::conj, Sign::conj}},
    };
    for (const MomentQuery& q : queries) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const girko::LimitSample s = girko::sample_limit_coeffs(tau, 2, {5150, i});
            cplx prod = 1.0;
            for (std::size_t j = 0; j < q.ks.size(); ++j) {
                const cplx x =
                    s.X[static_cast<std::size_t>(q.ks[j]) - 1] / std::sqrt(double(q.ks[j]));
                prod *= q.signs[j] == Sign::conj ? std::conj(x) : x;
            }
            acc += prod;
        }
        acc /= static_cast<double>(N);
        const cplx want = girko::wick_limit_moment(q, tau);
        CAPTURE(q.ks);
        CHECK(std::abs(acc - want) < 5 * 3.0 / std::sqrt(static_cast<double>(N)));
    }
}

TEST_CASE("finite-n moments approach the Wick limit over the battery") {
    const std::vector<MomentQuery> battery = query_battery();
    CHECK(battery.size() > 400);
    for (const std::string& id : {std::string("rademacher"), std::string("complex_rademacher")}) {
        const girko::EntryDistribution& d = *girko::find_distribution(id);
        for (const MomentQuery& q : battery) {
            const cplx wick = girko::wick_limit_moment(q, d.tau);
            const double d3 = std::abs(girko::exact_trace_moment(q, 3, d) - wick);
            const double d6 = std::abs(girko::exact_trace_moment(q, 6, d) - wick);
            CAPTURE(id);
            CAPTURE(q.ks);
            CHECK(d6 < d3 + 1e-12);
        }
    }
}

TEST_CASE("mean_rk: odd zero, k=2 closed form, double-cycle count at k=4") {
    CHECK(girko::mean_rk(1, 10, cplx(0.5)).unnormalized == cplx(0.0));
    CHECK(girko::mean_rk(3, 10, cplx(0.5)).unnormalized == cplx(0.0));
    const girko::MeanRk k2 = girko::mean_rk(2, 7, cplx(0.5, 0.1));
    CHECK(std::abs(k2.unnormalized - 7.0 * cplx(0.5, 0.1)) < 1e-14);
    CHECK(std::abs(k2.normalized - cplx(0.5, 0.1)) < 1e-14);
    const girko::MeanRk k4 = girko::mean_rk(4, 3, cplx(0.5));
    CHECK(std::abs(k4.unnormalized - cplx(1.5)) < 1e-14); // tau^2 * 3 * 2
    CHECK_THROWS_AS(girko::mean_rk(0, 3, cplx(0.0)), std::invalid_argument);
}

TEST_CASE("mean_rk matches enumeration of E[r_k] at n = 2 and 3, rademacher") {
    for (std::size_t n : {2u, 3u}) {
        std::vector<cplx> acc(5, cplx(0.0));
        std::size_t count = 0;
        for_all_sign_matrices(n, [&](const ComplexMatrix& a) {
            for (int k = 1; k <= 4; ++k) acc[static_cast<std::size_t>(k)] += girko::split_trace(a, k).r;
            ++count;
        });
        const girko::EntryDistribution& rad = *girko::find_distribution("rademacher");
        for (int k = 1; k <= 4; ++k) {
            const cplx mean = acc[static_cast<std::size_t>(k)] / static_cast<double>(count);
            const cplx want = exact_mean_rk(k, n, rad);
            CAPTURE(n);
            CAPTURE(k);
            CHECK(std::abs(mean - want) < 1e-12);
            // the dominant double-cycle class alone is mean_rk; the gap is
            // the single-vertex class, O(n) against O(n^{k/2}) as n grows
            const cplx dominant = girko::mean_rk(k, n, rad.tau).unnormalized;
            CHECK(std::abs(want - dominant) <= static_cast<double>(n) + 1e-12);
        }
    }
}

TEST_CASE("empirical mean and shrinking variance of r_k / n^{k/2}") {
    const std::size_t N = 10000;
    for (const std::string& id : {std::string("rademacher"), std::string("complex_rademacher")}) {
        const girko::EntryDistribution& d = *girko::find_distribution(id);
        std::vector<std::vector<double>> variance(2);
        const std::size_t sizes[2] = {16, 64};
        for (int si = 0; si < 2; ++si) {
            const std::size_t n = sizes[si];
            const double norm4[5] = {0, std::sqrt(double(n)), double(n),
                                     std::pow(double(n), 1.5), double(n) * double(n)};
            for (int k = 2; k <= 4; ++k) {
                cplx mean = 0.0;
                double second = 0.0;
                for (std::size_t t = 0; t < N; ++t) {
                    const ComplexMatrix a = girko::sample_matrix(d, n, {7000 + n, t});
                    const cplx v = girko::split_trace(a, k).r / norm4[k];
                    mean += v;
                    second += std::norm(v);
                }
                mean /= static_cast<double>(N);
                const double var =
                    std::max(second / static_cast<double>(N) - std::norm(mean), 0.0);
                variance[si].push_back(var);
                const double se = std::sqrt(var / static_cast<double>(N));
                const cplx want = exact_mean_rk(k, n, d) / norm4[k];
                CAPTURE(id);
                CAPTURE(n);
                CAPTURE(k);
                CHECK(std::abs(mean - want) < 5 * se + 1e-12);
                // the library's asymptotic mean is within the O(1/n) class gap
                CHECK(std::abs(girko::mean_rk(k, n, d.tau).normalized - want) <=
                      static_cast<double>(n) / norm4[k] + 1e-12);
            }
        }
        for (std::size_t i = 0; i < variance[0].size(); ++i) {
            const double slack =
                5 * (variance[0][i] + variance[1][i]) * std::sqrt(2.0 / static_cast<double>(N));
            CHECK(variance[1][i] <= variance[0][i] + slack);
        }
    }
}
