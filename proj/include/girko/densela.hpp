#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "girko/complex_matrix.hpp"
#include "girko/seed.hpp"

namespace girko {

// All eigenvalues with multiplicity. `converged` is false when some
// deflation missed its iteration budget; `residual` then holds the largest
// subdiagonal magnitude that had to be abandoned.
struct Spectrum {
    std::vector<cplx> eigenvalues;
    bool converged = true;
    double residual = 0.0;
};

struct EigenOptions {
    double deflation_tol = 1e-12; // relative to the local subdiagonal scale
    int max_iter_per_eigenvalue = 40;
    bool balance = true;
};

// Determinant via LU with partial pivoting by modulus.
inline cplx determinant(const ComplexMatrix& a) {
    const std::size_t n = a.n();
    std::vector<cplx> lu = a.data();
    cplx det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = std::abs(lu[i * n + k]);
            if (m > best) { best = m; piv = i; }
        }
        if (best == 0.0) return cplx(0.0);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
            det = -det;
        }
        const cplx pivot = lu[k * n + k];
        det *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = lu[i * n + k] / pivot;
            if (f == cplx(0.0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
        }
    }
    return det;
}

// (Tr A, Tr A^2, ..., Tr A^kmax) by iterated multiplication.
inline std::vector<cplx> traces_of_powers(const ComplexMatrix& a, int kmax) {
    if (kmax < 1) throw std::invalid_argument("traces_of_powers: kmax must be >= 1");
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(kmax));
    ComplexMatrix p = a;
    out.push_back(p.trace());
    for (int k = 2; k <= kmax; ++k) {
        p = p * a;
        out.push_back(p.trace());
    }
    return out;
}

namespace detail {

inline double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Parlett-Reinsch balancing (radix 2 diagonal similarity).
inline void balance(std::vector<cplx>& h, std::size_t n) {
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(h[j * n + i]);
                r += abs1(h[i * n + j]);
            }
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0;
            const double s = c + r;
            double g = r / 2.0;
            while (c < g) { f *= 2.0; c *= 4.0; }
            g = r * 2.0;
            while (c > g) { f /= 2.0; c /= 4.0; }
            if ((c + r) / f < 0.95 * s && f != 1.0) {
                done = false;
                const double inv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) h[i * n + j] *= inv;
                for (std::size_t j = 0; j < n; ++j) h[j * n + i] *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by unitary (Householder) similarity.
inline void hessenberg(std::vector<cplx>& h, std::size_t n) {
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h[i * n + k]);
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;
        const cplx alpha = h[(k + 1) * n + k];
        const double aa = std::abs(alpha);
        const cplx phase = aa == 0.0 ? cplx(1.0) : alpha / aa;
        const cplx beta = -phase * xnorm;

        const std::size_t m = n - k - 1; // reflector length
        v[0] = alpha - beta;
        for (std::size_t i = 1; i < m; ++i) v[i] = h[(k + 1 + i) * n + k];
        double vnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        const double tau = 2.0 / vnorm2;

        // left: H <- (I - tau v v^H) H on rows k+1..n-1, columns k..n-1
        for (std::size_t j = k; j < n; ++j) {
            cplx w = 0.0;
            for (std::size_t i = 0; i < m; ++i) w += std::conj(v[i]) * h[(k + 1 + i) * n + j];
            w *= tau;
            for (std::size_t i = 0; i < m; ++i) h[(k + 1 + i) * n + j] -= w * v[i];
        }
        // right: H <- H (I - tau v v^H) on columns k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            cplx w = 0.0;
            cplx* row = &h[i * n + k + 1];
            for (std::size_t j = 0; j < m; ++j) w += row[j] * v[j];
            w *= tau;
            for (std::size_t j = 0; j < m; ++j) row[j] -= w * std::conj(v[j]);
        }
        h[(k + 1) * n + k] = beta;
        for (std::size_t i = k + 2; i < n; ++i) h[i * n + k] = 0.0;
    }
}

inline void eig2x2(cplx a, cplx b, cplx c, cplx d, cplx& l1, cplx& l2) {
    const cplx mid = 0.5 * (a + d);
    const cplx disc = std::sqrt(mid * mid - (a * d - b * c));
    l1 = mid + disc;
    l2 = mid - disc;
    // the larger root first, the other from the determinant for accuracy
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    if (l1 != cplx(0.0)) l2 = (a * d - b * c) / l1;
}

// One explicit-shift QR sweep on the active block [lo, hi]; rotations are
// applied to the full rows/columns so the whole matrix stays similar.
inline void qr_step(std::vector<cplx>& h, std::size_t n, std::size_t lo, std::size_t hi,
                    cplx shift) {
    for (std::size_t j = lo; j <= hi; ++j) h[j * n + j] -= shift;
    const std::size_t nrot = hi - lo;
    static thread_local std::vector<double> cs;
    static thread_local std::vector<cplx> sn;
    cs.resize(nrot);
    sn.resize(nrot);
    for (std::size_t j = lo; j < hi; ++j) {
        const cplx a = h[j * n + j];
        const cplx b = h[(j + 1) * n + j];
        const double aa = std::abs(a), bb = std::abs(b);
        double c;
        cplx s;
        if (bb == 0.0) {
            c = 1.0; s = 0.0;
        } else if (aa == 0.0) {
            c = 0.0; s = 1.0;
        } else {
            const double r = std::hypot(aa, bb);
            c = aa / r;
            s = (a / aa) * std::conj(b) / r;
        }
        cs[j - lo] = c;
        sn[j - lo] = s;
        cplx* rj = &h[j * n];
        cplx* rj1 = &h[(j + 1) * n];
        for (std::size_t col = j; col < n; ++col) {
            const cplx x = rj[col], y = rj1[col];
            rj[col] = c * x + s * y;
            rj1[col] = -std::conj(s) * x + c * y;
        }
        rj1[j] = 0.0;
    }
    for (std::size_t j = lo; j < hi; ++j) {
        const double c = cs[j - lo];
        const cplx s = sn[j - lo];
        const cplx sc = std::conj(s);
        for (std::size_t i = 0; i <= j + 1; ++i) {
            const cplx x = h[i * n + j], y = h[i * n + j + 1];
            h[i * n + j] = c * x + sc * y;
            h[i * n + j + 1] = -s * x + c * y;
        }
    }
    for (std::size_t j = lo; j <= hi; ++j) h[j * n + j] += shift;
}

} // namespace detail

// Full non-symmetric eigensolver: balancing, Hessenberg reduction, shifted
// QR with Wilkinson shifts and relative deflation.
inline Spectrum eigenvalues(const ComplexMatrix& a, const EigenOptions& opt = {}) {
    const std::size_t n = a.n();
    Spectrum spec;
    spec.eigenvalues.assign(n, cplx(0.0));
    if (n == 0) return spec;
    if (n == 1) {
        spec.eigenvalues[0] = a(0, 0);
        return spec;
    }

    std::vector<cplx> h = a.data();
    if (opt.balance) detail::balance(h, n);
    detail::hessenberg(h, n);

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) r += detail::abs1(h[i * n + j]);
        anorm = std::max(anorm, r);
    }
    if (anorm == 0.0) anorm = 1.0;

    std::int64_t hi = static_cast<std::int64_t>(n) - 1;
    int iters = 0;
    while (hi >= 0) {
        // locate the active block [lo, hi]
        std::int64_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h[lo * n + lo - 1]);
            double scale = std::abs(h[(lo - 1) * n + lo - 1]) + std::abs(h[lo * n + lo]);
            if (scale == 0.0) scale = anorm;
            if (sub <= opt.deflation_tol * scale) {
                h[lo * n + lo - 1] = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            spec.eigenvalues[hi] = h[hi * n + hi];
            --hi;
            iters = 0;
            continue;
        }
        if (lo + 1 == hi) {
            cplx l1, l2;
            detail::eig2x2(h[lo * n + lo], h[lo * n + hi], h[hi * n + lo], h[hi * n + hi], l1, l2);
            spec.eigenvalues[lo] = l1;
            spec.eigenvalues[hi] = l2;
            hi -= 2;
            iters = 0;
            continue;
        }
        if (iters >= opt.max_iter_per_eigenvalue) {
            // give up on this eigenvalue; flagged, never silent
            spec.converged = false;
            spec.residual = std::max(spec.residual, std::abs(h[hi * n + hi - 1]));
            spec.eigenvalues[hi] = h[hi * n + hi];
            h[hi * n + hi - 1] = 0.0;
            --hi;
            iters = 0;
            continue;
        }

        cplx shift;
        if (iters > 0 && iters % 10 == 0) {
            shift = h[hi * n + hi] + 0.75 * std::abs(h[hi * n + hi - 1]);
        } else {
            cplx l1, l2;
            detail::eig2x2(h[(hi - 1) * n + hi - 1], h[(hi - 1) * n + hi], h[hi * n + hi - 1],
                           h[hi * n + hi], l1, l2);
            const cplx corner = h[hi * n + hi];
            shift = std::abs(l1 - corner) < std::abs(l2 - corner) ? l1 : l2;
        }
        detail::qr_step(h, n, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), shift);
        ++iters;
    }
    return spec;
}

inline double spectral_radius(const Spectrum& spec) {
    double r = 0.0;
    for (const cplx& l : spec.eigenvalues) r = std::max(r, std::abs(l));
    return r;
}

inline double spectral_radius(const ComplexMatrix& a, const EigenOptions& opt = {}) {
    return spectral_radius(eigenvalues(a, opt));
}

struct OperatorNormResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

namespace detail {

// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
inline double tridiag_top_eigenvalue(const std::vector<double>& alpha,
                                     const std::vector<double>& beta, std::size_t m) {
    double lo = alpha[0], hi_b = alpha[0];
    for (std::size_t i = 0; i < m; ++i) {
        const double bl = i > 0 ? std::abs(beta[i - 1]) : 0.0;
        const double br = i + 1 < m ? std::abs(beta[i]) : 0.0;
        lo = std::min(lo, alpha[i] - bl - br);
        hi_b = std::max(hi_b, alpha[i] + bl + br);
    }
    const double scale = std::max({std::abs(lo), std::abs(hi_b), 1e-300});
    // count of eigenvalues strictly below x
    const auto count_below = [&](double x) {
        int cnt = 0;
        double q = alpha[0] - x;
        if (q < 0.0) ++cnt;
        for (std::size_t i = 1; i < m; ++i) {
            const double denom = q == 0.0 ? 1e-300 : q;
            q = alpha[i] - x - beta[i - 1] * beta[i - 1] / denom;
            if (q < 0.0) ++cnt;
        }
        return cnt;
    };
    double a = lo, b = hi_b + scale * 1e-15;
    for (int it = 0; it < 200 && b - a > 1e-15 * scale; ++it) {
        const double mid = 0.5 * (a + b);
        if (count_below(mid) >= static_cast<int>(m))
            b = mid;
        else
            a = mid;
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Largest singular value: Krylov (Lanczos) iteration on the Gram matrix
// A^H A with a deterministic random start and restart on breakdown.
inline OperatorNormResult operator_norm_info(const ComplexMatrix& a, double tol = 1e-8,
                                             int max_steps = 400) {
    const std::size_t n = a.n();
    OperatorNormResult res;
    if (n == 0) { res.converged = true; return res; }

    std::mt19937_64 gen = make_stream({0x6772616d6d61746eULL, 0});
    const int max_restarts = 3;
    double best = 0.0;
    bool converged = false;
    int total_steps = 0;

    std::vector<cplx> v(n), vprev(n), w(n), tmp(n);
    std::vector<double> alpha, beta;
    for (int restart = 0; restart < max_restarts && !converged; ++restart) {
        for (cplx& x : v) x = cplx(gaussian(gen), gaussian(gen));
        double nv = 0.0;
        for (const cplx& x : v) nv += std::norm(x);
        nv = std::sqrt(nv);
        if (nv == 0.0) continue;
        for (cplx& x : v) x /= nv;
        std::fill(vprev.begin(), vprev.end(), cplx(0.0));
        alpha.clear();
        beta.clear();

        double prev_top = -1.0;
        int stable = 0;
        const std::size_t limit = std::min<std::size_t>(n, static_cast<std::size_t>(max_steps));
        for (std::size_t j = 0; j < limit; ++j) {
            a.apply(v, tmp);
            a.apply_adjoint(tmp, w); // w = A^H A v
            if (!beta.empty())
                for (std::size_t i = 0; i < n; ++i) w[i] -= beta.back() * vprev[i];
            double al = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                al += (std::conj(v[i]) * w[i]).real();
            alpha.push_back(al);
            for (std::size_t i = 0; i < n; ++i) w[i] -= al * v[i];
            double nb = 0.0;
            for (const cplx& x : w) nb += std::norm(x);
            nb = std::sqrt(nb);
            ++total_steps;

            const double top = detail::tridiag_top_eigenvalue(alpha, beta, alpha.size());
            best = std::max(best, top);
            if (prev_top >= 0.0 && std::abs(top - prev_top) <= tol * std::max(top, 1e-30)) {
                if (++stable >= 3) { converged = true; break; }
            } else {
                stable = 0;
            }
            prev_top = top;

            if (nb <= 1e-14 * std::sqrt(std::max(top, 1.0))) {
                // Krylov space exhausted; the tridiagonal is exact here
                converged = true;
                break;
            }
            beta.push_back(nb);
            vprev.swap(v);
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nb;
        }
        if (limit == n) converged = true;
    }
    res.value = std::sqrt(std::max(best, 0.0));
    res.converged = converged;
    res.iterations = total_steps;
    return res;
}

inline double operator_norm(const ComplexMatrix& a, double tol = 1e-8) {
    return operator_norm_info(a, tol).value;
}

// Power sums of the eigenvalues: (sum l_i, sum l_i^2, ..., sum l_i^K).
inline std::vector<cplx> power_sums(const std::vector<cplx>& eigs, int kmax) {
    std::vector<cplx> sums(static_cast<std::size_t>(kmax), cplx(0.0));
    for (const cplx& l : eigs) {
        cplx p = 1.0;
        for (int k = 0; k < kmax; ++k) {
            p *= l;
            sums[static_cast<std::size_t>(k)] += p;
        }
    }
    return sums;
}

} // namespace girko
