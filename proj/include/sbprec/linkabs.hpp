// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/precoding.hpp"

#include <cstdint>
#include <span>

namespace sbp {

/// MCS index 22 of the 64QAM PDSCH/PUSCH table (3GPP TS 38.214 Table
/// 5.1.3.1-1): modulation order 6, target code rate 666/1024.
inline constexpr int kMcs22ModulationOrder = 6;
inline constexpr double kMcs22CodeRateX1024 = 666.0;
inline constexpr double kMcs22SpectralEfficiency = kMcs22ModulationOrder * kMcs22CodeRateX1024 / 1024.0;

/// Logistic BLER curve around a Shannon-capacity threshold.
struct McsModel {
    double spectral_eff_bits = kMcs22SpectralEfficiency;
    double shannon_gap_db = 2.0;
    double transition_slope = 5.0; ///< per dB

    /// SNR (dB) at which the block error probability is exactly 1/2.
    double threshold_db() const;
    void validate() const;
};

struct BlerPoint {
    double snr_db = 0.0;
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    double bler = 0.0;

    bool operator==(const BlerPoint&) const = default;
};

BlerPoint make_bler_point(double snr_db, std::int64_t trials, std::int64_t errors);

/// Mean-mutual-information effective SNR: C^-1(mean C(gamma_l)), C = log2(1 + x).
double effective_snr(std::span<const double> gammas);

/// Block error probability; strictly inside (0, 1) for every input.
double tb_error_prob(double gamma_eff, const McsModel& mcs);

/// Transport block in error iff rng_draw < tb_error_prob(effective SNR).
bool simulate_tb(std::span<const SubbandAssignment> assignments, const McsModel& mcs, double rng_draw);

double db_to_linear(double db);
double linear_to_db(double lin);

} // namespace sbp
