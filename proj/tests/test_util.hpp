// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/numerics.hpp"
#include "sbprec/rng.hpp"

#include <Eigen/Dense>

namespace sbp::test {

inline CMat random_matrix(RngStream& rng, std::size_t rows, std::size_t cols)
{
    CMat m(rows, cols);
    for (auto& x : m.data()) {
        x = rng.complex_gaussian(1.0);
    }
    return m;
}

inline CVec random_unit_vector(RngStream& rng, std::size_t n)
{
    CVec v(n);
    for (auto& x : v) {
        x = rng.complex_gaussian(1.0);
    }
    const double s = norm(v);
    for (auto& x : v) {
        x /= s;
    }
    return v;
}

inline Eigen::MatrixXcd to_eigen(const CMat& m)
{
    Eigen::MatrixXcd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
        }
    }
    return e;
}

/// Eigenvalues in ascending order from Eigen's self-adjoint solver.
inline Eigen::VectorXd eigenvalues(const CMat& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace sbp::test
