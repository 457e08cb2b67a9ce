// SPDX-License-Identifier: Apache-2.0

#include "sbprec/errors.hpp"
#include "sbprec/linkabs.hpp"
#include "sbprec/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

using namespace sbp;

TEST_CASE("MCS 22 constants")
{
    CHECK(kMcs22SpectralEfficiency == 3.90234375);
    const McsModel m;
    // 2^3.90234375 - 1 = 13.9521..., 11.4464 dB, plus the 2 dB gap
    CHECK(m.threshold_db() == doctest::Approx(10.0 * std::log10(std::exp2(3.90234375) - 1.0) + 2.0).epsilon(1e-14));
    CHECK(m.threshold_db() == doctest::Approx(13.4464).epsilon(1e-4));
    CHECK_NOTHROW(m.validate());
    McsModel bad;
    bad.transition_slope = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = McsModel{};
    bad.spectral_eff_bits = -1.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("effective SNR")
{
    const std::array<double, 4> same{2.5, 2.5, 2.5, 2.5};
    CHECK(effective_snr(same) == doctest::Approx(2.5).epsilon(1e-15));
    const std::array<double, 2> pair{0.0, 3.0};
    CHECK(effective_snr(pair) == doctest::Approx(1.0).epsilon(1e-15));

    RngStream rng(1, StreamPurpose::TestData, 0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> g(1 + static_cast<std::size_t>(i % 17));
        for (auto& x : g) {
            x = 100.0 * rng.uniform();
        }
        const double e = effective_snr(g);
        const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
        CHECK(e >= *lo * (1 - 1e-12));
        CHECK(e <= *hi * (1 + 1e-12));
    }

    CHECK_THROWS_AS(effective_snr(std::span<const double>{}), ParameterError);
    const std::array<double, 2> neg{1.0, -0.5};
    CHECK_THROWS_AS(effective_snr(neg), ParameterError);
}

TEST_CASE("block error probability")
{
    const McsModel m;
    CHECK(tb_error_prob(db_to_linear(m.threshold_db()), m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tb_error_prob(0.0, m) > 0.5);
    CHECK(tb_error_prob(0.0, m) < 1.0);
    CHECK(tb_error_prob(1e30, m) > 0.0);
    CHECK(tb_error_prob(1e30, m) < 1e-100);

    double prev = 1.0;
    for (double db = -10.0; db <= 40.0; db += 0.25) {
        const double p = tb_error_prob(db_to_linear(db), m);
        CHECK(p <= prev);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        prev = p;
    }
    // one dB above threshold, slope 5/dB
    CHECK(tb_error_prob(db_to_linear(m.threshold_db() + 1.0), m) ==
          doctest::Approx(1.0 / (1.0 + std::exp(5.0))).epsilon(1e-10));
}

TEST_CASE("transport block decisions")
{
    const McsModel m;
    std::vector<SubbandAssignment> as(3);
    for (std::size_t i = 0; i < as.size(); ++i) {
        as[i].post_snr_linear = db_to_linear(10.0 + 3.0 * static_cast<double>(i));
    }
    for (double snr : {0.0, 1.0, 1e3, 1e12}) {
        std::vector<SubbandAssignment> x(2);
        x[0].post_snr_linear = snr;
        x[1].post_snr_linear = snr;
        CHECK(simulate_tb(x, m, 0.0));
        CHECK_FALSE(simulate_tb(x, m, 1.0));
    }

    std::vector<double> g;
    for (const auto& a : as) {
        g.push_back(a.post_snr_linear);
    }
    const double p = tb_error_prob(effective_snr(g), m);
    REQUIRE(p > 0.05);
    REQUIRE(p < 0.95);
    RngStream rng(4, StreamPurpose::TbDecision, 0);
    constexpr int kDraws = 100000;
    int errors = 0;
    for (int i = 0; i < kDraws; ++i) {
        errors += simulate_tb(as, m, rng.uniform()) ? 1 : 0;
    }
    const double sigma = std::sqrt(kDraws * p * (1.0 - p));
    CHECK(std::abs(errors - kDraws * p) < 3.0 * sigma);
}

TEST_CASE("BLER points and dB helpers")
{
    const BlerPoint b = make_bler_point(1.5, 8, 2);
    CHECK(b.bler == 0.25);
    CHECK_THROWS_AS(make_bler_point(0.0, 0, 0), ParameterError);
    CHECK_THROWS_AS(make_bler_point(0.0, 4, 5), ParameterError);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
}
