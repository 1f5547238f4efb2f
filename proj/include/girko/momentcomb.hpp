#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "girko/complex_matrix.hpp"
#include "girko/densela.hpp"
#include "girko/ensemble.hpp"

namespace girko {

enum class Sign { plain, conj };

// A mixed-moment query E[(t_{k_1}/n^{k_1/2})^{s_1} ... (t_{k_m}/n^{k_m/2})^{s_m}].
struct MomentQuery {
    std::vector<int> ks;
    std::vector<Sign> signs;
};

inline void validate(const MomentQuery& q) {
    if (q.ks.empty() || q.ks.size() != q.signs.size())
        throw std::invalid_argument("MomentQuery: ks and signs must be nonempty and equal length");
    for (int k : q.ks)
        if (k < 1) throw std::invalid_argument("MomentQuery: all k must be >= 1");
}

struct TraceSplit {
    cplx t; // distinct-index (cycle) part
    cplx r; // repeated-index part; Tr(A^k) = k t + r
};

namespace detail {

// All directed k-cycles on {0..n-1} as edge lists; each cycle listed once
// (canonical start at its smallest vertex). For k = 1 the cycle is a loop.
inline std::vector<std::vector<std::array<int, 2>>> directed_cycles(int n, int k) {
    std::vector<std::vector<std::array<int, 2>>> cycles;
    std::vector<int> seq(static_cast<std::size_t>(k));
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    const auto emit = [&] {
        std::vector<std::array<int, 2>> edges(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            edges[static_cast<std::size_t>(i)] = {seq[static_cast<std::size_t>(i)],
                                                  seq[static_cast<std::size_t>((i + 1) % k)]};
        cycles.push_back(std::move(edges));
    };
    const auto rec = [&](auto&& self, int pos) -> void {
        if (pos == k) { emit(); return; }
        for (int v = seq[0] + 1; v < n; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            used[static_cast<std::size_t>(v)] = 1;
            seq[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1);
            used[static_cast<std::size_t>(v)] = 0;
        }
    };
    for (int v0 = 0; v0 + k <= n + (k == 1 ? 1 : 0); ++v0) {
        // need k distinct vertices all >= v0
        if (n - v0 < k) break;
        seq[0] = v0;
        used[static_cast<std::size_t>(v0)] = 1;
        rec(rec, 1);
        used[static_cast<std::size_t>(v0)] = 0;
    }
    return cycles;
}

inline cplx cycle_product(const ComplexMatrix& a, const std::vector<std::array<int, 2>>& edges) {
    cplx p = 1.0;
    for (const auto& e : edges)
        p *= a(static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]));
    return p;
}

} // namespace detail

// Tr(A^k) = k t_k + r_k decomposition. Closed O(n^3) forms for k <= 4,
// direct cycle enumeration otherwise (budget n^k <= 10^8).
inline TraceSplit split_trace(const ComplexMatrix& a, int k) {
    if (k < 1) throw std::invalid_argument("split_trace: k must be >= 1");
    const std::size_t n = a.n();
    const auto sq = [](cplx z) { return z * z; };

    if (k == 1) return {a.trace(), cplx(0.0)};
    if (k == 2) {
        cplx t = 0.0, r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r += sq(a(i, i));
            for (std::size_t j = i + 1; j < n; ++j) t += a(i, j) * a(j, i);
        }
        return {t, r};
    }
    if (k == 3) {
        const ComplexMatrix c = a * a;
        cplx tr3 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) tr3 += c(i, j) * a(j, i);
        cplx r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r += sq(a(i, i)) * a(i, i);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) r += 3.0 * a(i, i) * a(i, j) * a(j, i);
        }
        return {(tr3 - r) / 3.0, r};
    }
    if (k == 4) {
        const ComplexMatrix c = a * a;
        cplx tr4 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) tr4 += c(i, j) * c(j, i);
        // repeated-index part by coincidence pattern of the 4 positions
        cplx r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r += sq(sq(a(i, i)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const cplx loop = a(i, j) * a(j, i);
                r += 4.0 * sq(a(i, i)) * loop;     // three equal positions
                r += 2.0 * a(i, i) * a(j, j) * loop; // (i,i,j,j) and (i,j,j,i)
                r += sq(loop);                      // (i,j,i,j)
            }
        // one diagonal vertex on a 3-cycle: 4 sum_{i,j,k distinct} a_ii a_ij a_jk a_ki
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) {
                if (l == i) continue;
                const cplx path = c(i, l) - a(i, i) * a(i, l) - a(i, l) * a(l, l);
                r += 4.0 * a(i, i) * a(l, i) * path;
            }
        // two 2-loops sharing a hub: 2 sum_i sum_{j != k, both != i} b_ij b_ik
        for (std::size_t i = 0; i < n; ++i) {
            cplx rowsum = 0.0, rowsq = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const cplx b = a(i, j) * a(j, i);
                rowsum += b;
                rowsq += sq(b);
            }
            r += 2.0 * (sq(rowsum) - rowsq);
        }
        return {(tr4 - r) / 4.0, r};
    }

    if (std::pow(static_cast<double>(n), k) > 1e8)
        throw std::runtime_error("split_trace: n^k exceeds the 10^8 enumeration budget");
    const auto cycles = detail::directed_cycles(static_cast<int>(n), k);
    cplx t = 0.0;
    for (const auto& cyc : cycles) t += detail::cycle_product(a, cyc);
    const std::vector<cplx> traces = traces_of_powers(a, k);
    return {t, traces.back() - static_cast<double>(k) * t};
}

// Exact E[(t_{k_1}/n^{k_1/2})^{s_1} ... (t_{k_m}/n^{k_m/2})^{s_m}] by
// expanding the product of cycle sums and factorizing the expectation over
// distinct directed edges with the distribution's moment table.
inline cplx exact_trace_moment(const MomentQuery& query, std::size_t n,
                               const EntryDistribution& dist) {
    validate(query);
    const std::size_t m = query.ks.size();
    int total_k = 0;
    for (int k : query.ks) total_k += k;
    if (std::pow(static_cast<double>(n), total_k) > 1e8)
        throw std::runtime_error("exact_trace_moment: n^(sum k) exceeds the 10^8 budget");

    std::vector<std::vector<std::vector<std::array<int, 2>>>> cycles(m);
    for (std::size_t i = 0; i < m; ++i)
        cycles[i] = detail::directed_cycles(static_cast<int>(n), query.ks[i]);

    struct EdgePow {
        int from, to, p, q;
    };
    std::vector<EdgePow> edges;
    edges.reserve(static_cast<std::size_t>(total_k));

    cplx sum = 0.0;
    const auto rec = [&](auto&& self, std::size_t factor) -> void {
        if (factor == m) {
            cplx prod = 1.0;
            for (const EdgePow& e : edges) {
                const auto mom = dist.moment(e.p, e.q);
                if (!mom)
                    throw std::runtime_error("exact_trace_moment: moment E[a^" +
                                             std::to_string(e.p) + " conj(a)^" +
                                             std::to_string(e.q) +
                                             "] unavailable for " + dist.id);
                prod *= *mom;
                if (prod == cplx(0.0)) break;
            }
            sum += prod;
            return;
        }
        const bool conjugated = query.signs[factor] == Sign::conj;
        for (const auto& cyc : cycles[factor]) {
            const std::size_t mark = edges.size();
            for (const auto& e : cyc) {
                bool found = false;
                for (EdgePow& ep : edges) {
                    if (ep.from == e[0] && ep.to == e[1]) {
                        (conjugated ? ep.q : ep.p) += 1;
                        found = true;
                        break;
                    }
                }
                if (!found) edges.push_back({e[0], e[1], conjugated ? 0 : 1, conjugated ? 1 : 0});
            }
            self(self, factor + 1);
            // undo
            for (const auto& e : cyc) {
                for (std::size_t i = edges.size(); i-- > 0;) {
                    if (edges[i].from == e[0] && edges[i].to == e[1]) {
                        (conjugated ? edges[i].q : edges[i].p) -= 1;
                        break;
                    }
                }
            }
            while (edges.size() > mark && edges.back().p == 0 && edges.back().q == 0)
                edges.pop_back();
        }
    };
    rec(rec, 0);
    return sum / std::pow(static_cast<double>(n), 0.5 * total_k);
}

// Limit of the same moment by the Wick/Isserlis closed form: sum over pair
// partitions with equal k inside each pair; pair covariances
// (plain, plain) -> tau^k / k, mixed -> 1/k, (conj, conj) -> conj(tau)^k / k.
inline cplx wick_limit_moment(const MomentQuery& query, cplx tau) {
    validate(query);
    const std::size_t m = query.ks.size();
    if (m % 2 != 0) return cplx(0.0);

    const auto pair_cov = [&](std::size_t i, std::size_t j) -> cplx {
        const int k = query.ks[i];
        if (k != query.ks[j]) return cplx(0.0);
        cplx tau_pow = 1.0;
        const bool ci = query.signs[i] == Sign::conj;
        const bool cj = query.signs[j] == Sign::conj;
        if (ci != cj) return cplx(1.0 / k);
        for (int p = 0; p < k; ++p) tau_pow *= tau;
        if (ci) tau_pow = std::conj(tau_pow);
        return tau_pow / static_cast<double>(k);
    };

    std::vector<char> used(m, 0);
    const auto rec = [&](auto&& self) -> cplx {
        std::size_t first = m;
        for (std::size_t i = 0; i < m; ++i)
            if (!used[i]) { first = i; break; }
        if (first == m) return cplx(1.0);
        used[first] = 1;
        cplx acc = 0.0;
        for (std::size_t j = first + 1; j < m; ++j) {
            if (used[j]) continue;
            const cplx cov = pair_cov(first, j);
            if (cov == cplx(0.0)) continue;
            used[j] = 1;
            acc += cov * self(self);
            used[j] = 0;
        }
        used[first] = 0;
        return acc;
    };
    return rec(rec);
}

struct MeanRk {
    cplx unnormalized; // E[r_k^{(n)}]
    cplx normalized;   // E[r_k^{(n)}] / n^{k/2}
};

// Exact E[r_k^{(n)}]: zero for odd k; tau^{k/2} n(n-1)...(n-k/2+1) for even
// k (the double-cycle count).
inline MeanRk mean_rk(int k, std::size_t n, cplx tau) {
    if (k < 1) throw std::invalid_argument("mean_rk: k must be >= 1");
    if (k % 2 != 0) return {cplx(0.0), cplx(0.0)};
    cplx tau_pow = 1.0;
    for (int p = 0; p < k / 2; ++p) tau_pow *= tau;
    double count = 1.0;
    for (int p = 0; p < k / 2; ++p) count *= static_cast<double>(n) - p;
    if (count < 0.0) count = 0.0;
    const cplx un = tau_pow * count;
    return {un, un / std::pow(static_cast<double>(n), 0.5 * k)};
}

} // namespace girko
