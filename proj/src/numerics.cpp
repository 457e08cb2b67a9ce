// SPDX-License-Identifier: Apache-2.0

#include "sbprec/numerics.hpp"

#include "sbprec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbp {

CMat::CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows * cols) {
        throw StructuralError("CMat: " + std::to_string(data_.size()) + " entries for a " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
}

CMat CMat::identity(std::size_t n)
{
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMat CMat::diag(std::span<const double> d)
{
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

CMat& CMat::operator+=(const CMat& other)
{
    if (other.rows_ != rows_ || other.cols_ != cols_) {
        throw StructuralError("CMat::operator+=: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CMat& CMat::operator*=(double s)
{
    for (auto& x : data_) {
        x *= s;
    }
    return *this;
}

double norm_sq(std::span<const cplx> v)
{
    double acc = 0.0;
    for (const auto& x : v) {
        acc += x.real() * x.real() + x.imag() * x.imag();
    }
    return acc;
}

double norm(std::span<const cplx> v) { return std::sqrt(norm_sq(v)); }

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size()) {
        throw StructuralError("inner: length mismatch");
    }
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += conj_mul(a[i], b[i]);
    }
    return acc;
}

CVec kron(std::span<const cplx> a, std::span<const cplx> b)
{
    CVec out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            out.push_back(x * y);
        }
    }
    return out;
}

CVec matvec(const CMat& m, std::span<const cplx> v)
{
    if (m.cols() != v.size()) {
        throw StructuralError("matvec: shape mismatch");
    }
    CVec out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t c = 0; c < m.cols(); ++c) {
            acc += m(r, c) * v[c];
        }
        out[r] = acc;
    }
    return out;
}

CMat matmul(const CMat& a, const CMat& b)
{
    if (a.cols() != b.rows()) {
        throw StructuralError("matmul: shape mismatch");
    }
    CMat out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx x = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += x * b(k, c);
            }
        }
    }
    return out;
}

CMat conj_transpose(const CMat& m)
{
    CMat out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = std::conj(m(r, c));
        }
    }
    return out;
}

double frobenius_norm(const CMat& m) { return norm(m.data()); }

void accumulate_gram(const CMat& h, CMat& acc)
{
    const std::size_t n = h.cols();
    if (acc.rows() != n || acc.cols() != n) {
        throw StructuralError("accumulate_gram: accumulator must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t r = 0; r < h.rows(); ++r) {
            const cplx x = h(r, i);
            d += x.real() * x.real() + x.imag() * x.imag();
        }
        acc(i, i) = {acc(i, i).real() + d, 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx s{0.0, 0.0};
            for (std::size_t r = 0; r < h.rows(); ++r) {
                s += conj_mul(h(r, i), h(r, j));
            }
            acc(i, j) += s;
            acc(j, i) = std::conj(acc(i, j));
        }
    }
}

CMat gram(const CMat& h)
{
    CMat out(h.cols(), h.cols());
    accumulate_gram(h, out);
    return out;
}

bool is_hermitian(const CMat& m, double tol)
{
    if (!m.square()) {
        return false;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

void normalize_phase(std::span<cplx> v)
{
    for (const auto& x : v) {
        const double mag = std::abs(x);
        if (mag > 1e-12) {
            const cplx rot = std::conj(x) / mag;
            for (auto& y : v) {
                y *= rot;
            }
            break;
        }
    }
    for (auto& x : v) {
        if (std::abs(x) > 1e-12) {
            x = {std::abs(x), 0.0};
            break;
        }
    }
}

namespace {

// Squarings applied before iterating; the iteration then runs on m^(2^k).
constexpr int kSquarings = 3;

struct PowerRun {
    bool converged = false;
    EigPair pair;
};

PowerRun power_iterate(const CMat& m, const CMat& accel, CVec v, double tol, int max_iter)
{
    PowerRun run;
    for (int it = 0; it < max_iter; ++it) {
        CVec w = matvec(accel, v);
        const double wn = norm(w);
        if (wn == 0.0) {
            // start vector has no component outside the null space
            return run;
        }
        for (auto& x : w) {
            x /= wn;
        }
        v = std::move(w);

        const CVec mv = matvec(m, v);
        const double lambda = std::max(0.0, inner(v, mv).real());
        double res = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            res += std::norm(mv[i] - lambda * v[i]);
        }
        if (std::sqrt(res) <= tol * std::max(1.0, lambda)) {
            run.converged = true;
            run.pair.value = lambda;
            run.pair.vector = std::move(v);
            return run;
        }
    }
    return run;
}

} // namespace

EigPair herm_dominant_eigpair(const CMat& m, double tol, int max_iter)
{
    if (!m.square()) {
        throw StructuralError("herm_dominant_eigpair: matrix is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected square");
    }
    const std::size_t n = m.rows();
    const double scale = frobenius_norm(m);
    if (!is_hermitian(m, tol * std::max(1.0, scale))) {
        throw StructuralError("herm_dominant_eigpair: matrix is not Hermitian");
    }

    CVec start(n, cplx{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
    if (scale == 0.0) {
        return {0.0, start};
    }

    CMat accel = m;
    accel *= 1.0 / scale;
    for (int k = 0; k < kSquarings; ++k) {
        accel = matmul(accel, accel);
        accel *= 1.0 / frobenius_norm(accel);
    }

    // A Rayleigh quotient below the largest diagonal entry means the iteration
    // locked onto a non-dominant eigenpair because the start vector was
    // orthogonal to the dominant eigenspace. Retry from the matching basis vector.
    std::size_t best_diag = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (m(i, i).real() > m(best_diag, best_diag).real()) {
            best_diag = i;
        }
    }
    const double diag_bound = m(best_diag, best_diag).real();

    PowerRun run = power_iterate(m, accel, start, tol, max_iter);
    const bool suspicious =
        !run.converged || run.pair.value < diag_bound - tol * std::max(1.0, run.pair.value);
    if (suspicious) {
        CVec basis(n);
        basis[best_diag] = 1.0;
        PowerRun retry = power_iterate(m, accel, basis, tol, max_iter);
        if (retry.converged && (!run.converged || retry.pair.value > run.pair.value)) {
            run = std::move(retry);
        }
    }
    if (!run.converged) {
        throw ConvergenceError("herm_dominant_eigpair: no convergence within " +
                               std::to_string(max_iter) + " iterations");
    }
    normalize_phase(run.pair.vector);
    return run.pair;
}

} // namespace sbp
