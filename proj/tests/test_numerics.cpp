// SPDX-License-Identifier: Apache-2.0

#include "sbprec/errors.hpp"
#include "sbprec/numerics.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace sbp;

namespace {

double residual(const CMat& m, const EigPair& e)
{
    const CVec mv = matvec(m, e.vector);
    double r = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) {
        r += std::norm(mv[i] - e.value * e.vector[i]);
    }
    return std::sqrt(r);
}

} // namespace

TEST_CASE("dominant eigenpair of small fixed matrices")
{
    SUBCASE("diagonal")
    {
        const std::array<double, 2> d{2.0, 1.0};
        const EigPair e = herm_dominant_eigpair(CMat::diag(d));
        CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(std::abs(e.vector[0] - cplx{1.0, 0.0}) < 1e-10);
        CHECK(std::abs(e.vector[1]) < 1e-10);
    }
    SUBCASE("identity: degenerate spectrum keeps the start vector")
    {
        const EigPair e = herm_dominant_eigpair(CMat::identity(4));
        CHECK(e.value == doctest::Approx(1.0));
        for (const auto& x : e.vector) {
            CHECK(x == cplx{0.5, 0.0});
        }
        CHECK(residual(CMat::identity(4), e) == 0.0);
    }
    SUBCASE("[[2,1],[1,2]]")
    {
        const CMat m(2, 2, {2.0, 1.0, 1.0, 2.0});
        const EigPair e = herm_dominant_eigpair(m);
        CHECK(e.value == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(std::abs(e.vector[0] - 1.0 / std::sqrt(2.0)) < 1e-10);
        CHECK(std::abs(e.vector[1] - 1.0 / std::sqrt(2.0)) < 1e-10);
    }
    SUBCASE("start vector orthogonal to the dominant eigenvector")
    {
        // all-equal start lies in the null space of this matrix
        const CMat m(2, 2, {1.0, -1.0, -1.0, 1.0});
        const EigPair e = herm_dominant_eigpair(m);
        CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(std::abs(std::abs(e.vector[1]) - 1.0 / std::sqrt(2.0)) < 1e-10);
    }
    SUBCASE("zero matrix")
    {
        const EigPair e = herm_dominant_eigpair(CMat(3, 3));
        CHECK(e.value == 0.0);
        CHECK(norm(e.vector) == doctest::Approx(1.0));
    }
}

TEST_CASE("dominant eigenpair errors")
{
    CHECK_THROWS_AS(herm_dominant_eigpair(CMat(2, 3)), StructuralError);
    const CMat not_herm(2, 2, {1.0, cplx{0.0, 1.0}, cplx{0.0, 1.0}, 1.0});
    CHECK_THROWS_AS(herm_dominant_eigpair(not_herm), StructuralError);
    // eigenvalues 1 and 0.999999: one iteration cannot reach 1e-10
    const std::array<double, 2> d{1.0, 0.999999};
    const CMat m = matmul(matmul(CMat(2, 2, {0.6, 0.8, -0.8, 0.6}), CMat::diag(d)), CMat(2, 2, {0.6, -0.8, 0.8, 0.6}));
    CHECK_THROWS_AS(herm_dominant_eigpair(m, 1e-15, 1), ConvergenceError);
}

TEST_CASE("dominant eigenpair matches Eigen on random Gram matrices")
{
    RngStream rng(7, StreamPurpose::TestData, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        const CMat m = gram(test::random_matrix(rng, 8, n));
        const EigPair e = herm_dominant_eigpair(m);
        const auto ev = test::eigenvalues(m);
        CHECK(e.value == doctest::Approx(ev(ev.size() - 1)).epsilon(1e-9));
        CHECK(residual(m, e) <= kEigTol * std::max(1.0, e.value));
        CHECK(norm(e.vector) == doctest::Approx(1.0).epsilon(1e-12));
        // phase convention: first entry real, non-negative
        CHECK(e.vector[0].imag() == 0.0);
        CHECK(e.vector[0].real() >= 0.0);
    }
}

TEST_CASE("rank-one input returns (|x|^2, x/|x|)")
{
    RngStream rng(8, StreamPurpose::TestData, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        CVec x(n);
        for (auto& z : x) {
            z = rng.complex_gaussian(1.0);
        }
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) = x[i] * std::conj(x[j]);
            }
        }
        const EigPair e = herm_dominant_eigpair(m);
        CHECK(e.value == doctest::Approx(norm_sq(x)).epsilon(1e-10));
        CVec u = x;
        for (auto& z : u) {
            z /= norm(x);
        }
        normalize_phase(u);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(u[i] - e.vector[i]) < 1e-9);
        }
    }
}

TEST_CASE("near-degenerate leading pair still converges")
{
    // eigenvalues 10 and 9.995 in a rotated basis
    RngStream rng(9, StreamPurpose::TestData, 0);
    const CMat q = test::random_matrix(rng, 8, 8);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(test::to_eigen(q));
    const Eigen::MatrixXcd u = qr.householderQ();
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(8, 1.0, 5.0);
    d(7) = 10.0;
    d(6) = 9.995;
    const Eigen::MatrixXcd me = u * d.asDiagonal() * u.adjoint();
    CMat m(8, 8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = me(r, c);
        }
    }
    // exact Hermitian symmetry
    for (std::size_t r = 0; r < 8; ++r) {
        m(r, r) = m(r, r).real();
        for (std::size_t c = r + 1; c < 8; ++c) {
            m(c, r) = std::conj(m(r, c));
        }
    }
    const EigPair e = herm_dominant_eigpair(m);
    CHECK(e.value == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("kron")
{
    const CVec a{1.0, 1.0};
    const CVec one{1.0};
    CHECK(kron(a, one) == CVec{1.0, 1.0});

    const cplx j{0.0, 1.0};
    const CVec b{1.0, j};
    const CVec c{1.0, -1.0};
    CHECK(kron(b, c) == CVec{1.0, -1.0, j, -j});

    RngStream rng(10, StreamPurpose::TestData, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const CVec x = test::random_unit_vector(rng, 4);
        const CVec y = test::random_unit_vector(rng, 2);
        const CVec k = kron(x, y);
        REQUIRE(k.size() == 8);
        CHECK(norm(k) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t jj = 0; jj < 2; ++jj) {
                CHECK(k[i * 2 + jj] == x[i] * y[jj]);
            }
        }
        // bilinearity
        const cplx alpha = rng.complex_gaussian(1.0);
        CVec ax = x;
        for (auto& z : ax) {
            z *= alpha;
        }
        const CVec lhs = kron(ax, y);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(std::abs(lhs[i] - alpha * k[i]) < 1e-14);
        }
    }
}

TEST_CASE("gram")
{
    CHECK(gram(CMat::identity(2)) == CMat::identity(2));

    const CMat h(3, 1, {1.0, cplx{0.0, 2.0}, -1.0});
    const CMat g = gram(h);
    REQUIRE(g.rows() == 1);
    CHECK(g(0, 0) == cplx{6.0, 0.0});

    RngStream rng(11, StreamPurpose::TestData, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const CMat m = gram(test::random_matrix(rng, 8, 4));
        // exactly Hermitian, not just within tolerance
        CHECK(m == conj_transpose(m));
        CHECK(test::eigenvalues(m)(0) >= -1e-12);
    }
    RngStream rng2(12, StreamPurpose::TestData, 0);
    const CMat h2 = test::random_matrix(rng2, 8, 4);
    const CMat explicit_gram = matmul(conj_transpose(h2), h2);
    const CMat g2 = gram(h2);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::abs(g2(i, j) - explicit_gram(i, j)) < 1e-12);
        }
    }
}
