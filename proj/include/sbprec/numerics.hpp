// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sbp {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Dense row-major complex matrix. Sizes in this project never exceed 8x8.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols);
    CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMat identity(std::size_t n);
    static CMat diag(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    CMat& operator+=(const CMat& other);
    CMat& operator*=(double s);

    bool operator==(const CMat& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// conj(a) * b, written out so that every code path rounds identically.
inline cplx conj_mul(cplx a, cplx b)
{
    return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

double norm(std::span<const cplx> v);
double norm_sq(std::span<const cplx> v);

/// a^H b, accumulated left to right.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);

CVec kron(std::span<const cplx> a, std::span<const cplx> b);
CVec matvec(const CMat& m, std::span<const cplx> v);
CMat matmul(const CMat& a, const CMat& b);
CMat conj_transpose(const CMat& m);
double frobenius_norm(const CMat& m);

/// H^H H. Only the upper triangle is computed; the lower one is its exact
/// conjugate mirror and the diagonal is exactly real.
CMat gram(const CMat& h);

/// acc += H^H H with the same mirroring as gram().
void accumulate_gram(const CMat& h, CMat& acc);

bool is_hermitian(const CMat& m, double tol);

struct EigPair {
    double value = 0.0;
    CVec vector;
};

inline constexpr double kEigTol = 1e-10;
inline constexpr int kEigMaxIter = 10'000;

/// Largest eigenvalue and its unit eigenvector of a Hermitian PSD matrix.
///
/// Power iteration from the all-equal start vector 1/sqrt(n), run on a
/// normalized power of the input to speed up convergence when the two leading
/// eigenvalues are close. Stops once |m v - lambda v| <= tol * max(1, lambda)
/// holds for the original matrix. The returned vector has its first
/// non-negligible entry real and non-negative.
///
/// When the dominant eigenvalue is repeated, any vector of the dominant
/// eigenspace may be returned.
///
/// Throws StructuralError for non-square or non-Hermitian input and
/// ConvergenceError if max_iter iterations do not reach tol.
EigPair herm_dominant_eigpair(const CMat& m, double tol = kEigTol, int max_iter = kEigMaxIter);

/// Rotates v so its first entry with modulus above 1e-12 is real non-negative.
void normalize_phase(std::span<cplx> v);

} // namespace sbp
