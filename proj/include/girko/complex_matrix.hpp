#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace girko {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}
    ComplexMatrix(std::size_t n, std::vector<cplx> entries) : n_(n), a_(std::move(entries)) {
        assert(a_.size() == n_ * n_);
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t n() const { return n_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::vector<cplx>& data() { return a_; }
    const std::vector<cplx>& data() const { return a_; }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    ComplexMatrix scaled(cplx factor) const {
        ComplexMatrix out(n_);
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = factor * a_[i];
        return out;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    bool all_finite() const {
        for (const cplx& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
        assert(lhs.n_ == rhs.n_);
        const std::size_t n = lhs.n_;
        ComplexMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const cplx x = lhs(i, k);
                if (x == cplx(0.0)) continue;
                const cplx* rrow = &rhs.a_[k * n];
                cplx* orow = &out.a_[i * n];
                for (std::size_t j = 0; j < n; ++j) orow[j] += x * rrow[j];
            }
        }
        return out;
    }

    // y = A x
    void apply(const std::vector<cplx>& x, std::vector<cplx>& y) const {
        y.assign(n_, cplx(0.0));
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx* row = &a_[i * n_];
            cplx acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
    }

    // y = A^H x
    void apply_adjoint(const std::vector<cplx>& x, std::vector<cplx>& y) const {
        y.assign(n_, cplx(0.0));
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx* row = &a_[i * n_];
            const cplx xi = x[i];
            for (std::size_t j = 0; j < n_; ++j) y[j] += std::conj(row[j]) * xi;
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

} // namespace girko
