// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/config.hpp"
#include "sbprec/linkabs.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbp {

inline constexpr const char* kVersion = "1.0.0";

/// One BLER curve.
struct Series {
    std::string scheme;
    std::vector<BlerPoint> points;
    /// Mean over trials and RBs of |V_rb^H w|, where w is the precoder the
    /// scheme applied to that RB.
    double mean_rb_metric = 0.0;
    /// Per-trial mean of the same quantity, in trial order.
    std::vector<double> trial_metric;
};

struct SweepResult {
    std::vector<Series> series;
    std::string config_echo;
    std::string version = kVersion;
    double wall_time_s = 0.0;

    const Series* find(std::string_view scheme) const;
};

/// Monte-Carlo BLER sweep.
///
/// Trial t draws channel realization (seed, t) and one uniform u_t. Every
/// scheme is selected on that realization, and at every SNR point the block is
/// in error iff u_t < P_err(effective SNR). Precoders are selected on the
/// configured sub-bands; post-processing SNRs are evaluated per RB with each
/// RB's own dominant direction, which keeps curves for different sub-band
/// sizes on the same footing. Output does not depend on `workers`.
SweepResult run_sweep(const SimConfig& cfg, int workers = 1);

/// Same trials as run_sweep, one series per (scheme, sub-band size), labelled
/// "<scheme>@sbs<size>".
SweepResult sbs_study(const SimConfig& cfg, std::span<const int> sbs_list, int workers = 1);

/// TPMI signalling load of one realization under SB selection.
struct TpmiStats {
    std::size_t n_subbands = 0;
    int bits_per_subband = 0;
    std::size_t total_bits = 0;
    /// (separation in sub-bands, fraction of sub-band pairs at that separation
    /// with equal TPMI)
    std::vector<std::pair<int, double>> agreement;

    double agreement_at(int separation) const;
};

inline constexpr std::array<int, 5> kAgreementSeparations{1, 2, 5, 10, 20};

TpmiStats tpmi_stats(const ChannelGrid& grid, const SubbandPartition& part, const Codebook& cb);

struct TpmiReport {
    struct Entry {
        std::string scheme;
        std::size_t codebook_size = 0;
        std::vector<TpmiStats> per_realization;
        TpmiStats mean; ///< agreement averaged over realizations
    };
    std::vector<Entry> entries;

    std::string to_text() const;
};

/// Signalling report for every SB codebook scheme in cfg, over n_tbs
/// realizations at cfg.sbs_rbs.
TpmiReport tpmi_report(const SimConfig& cfg, int workers = 1);

/// SNR where a BLER curve crosses `target`, interpolating log10(BLER) linearly
/// between the bracketing points. Zero-error points count as 0.5/trials.
std::optional<double> snr_at_bler(std::span<const BlerPoint> points, double target = 0.1);

/// Horizontal gap baseline - candidate at `target` BLER, in dB.
std::optional<double> gain_db(const Series& baseline, const Series& candidate, double target = 0.1);

} // namespace sbp
