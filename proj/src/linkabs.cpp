// SPDX-License-Identifier: Apache-2.0

#include "sbprec/linkabs.hpp"

#include "sbprec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace sbp {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

double McsModel::threshold_db() const
{
    return linear_to_db(std::exp2(spectral_eff_bits) - 1.0) + shannon_gap_db;
}

void McsModel::validate() const
{
    if (!(spectral_eff_bits > 0.0)) {
        throw ParameterError("mcs.spectral_eff_bits must be positive");
    }
    if (!(transition_slope > 0.0)) {
        throw ParameterError("mcs.transition_slope must be positive");
    }
    if (!std::isfinite(shannon_gap_db)) {
        throw ParameterError("mcs.shannon_gap_db must be finite");
    }
}

BlerPoint make_bler_point(double snr_db, std::int64_t trials, std::int64_t errors)
{
    if (trials < 1 || errors < 0 || errors > trials) {
        throw ParameterError("BlerPoint: need 0 <= errors <= trials and trials >= 1");
    }
    return {snr_db, trials, errors, static_cast<double>(errors) / static_cast<double>(trials)};
}

double effective_snr(std::span<const double> gammas)
{
    if (gammas.empty()) {
        throw ParameterError("effective_snr: empty SNR list");
    }
    double mi = 0.0;
    for (double g : gammas) {
        if (!(g >= 0.0)) {
            throw ParameterError("effective_snr: negative SNR");
        }
        mi += std::log1p(g);
    }
    mi /= static_cast<double>(gammas.size());
    return std::expm1(mi);
}

double tb_error_prob(double gamma_eff, const McsModel& mcs)
{
    constexpr double kLowest = std::numeric_limits<double>::denorm_min();
    constexpr double kHighest = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    const double snr_db = linear_to_db(std::max(gamma_eff, kLowest));
    const double x = mcs.transition_slope * (snr_db - mcs.threshold_db());
    const double p = 1.0 / (1.0 + std::exp(x));
    return std::clamp(p, kLowest, kHighest);
}

bool simulate_tb(std::span<const SubbandAssignment> assignments, const McsModel& mcs, double rng_draw)
{
    std::vector<double> gammas;
    gammas.reserve(assignments.size());
    for (const auto& a : assignments) {
        gammas.push_back(a.post_snr_linear);
    }
    return rng_draw < tb_error_prob(effective_snr(gammas), mcs);
}

} // namespace sbp
