// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/channel.hpp"
#include "sbprec/codebook.hpp"
#include "sbprec/numerics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sbp {

struct SubcarrierRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const SubcarrierRange&) const = default;
};

/// Contiguous, ascending, disjoint sub-bands covering the grid. All sub-bands
/// span sbs_rbs RBs except possibly a shorter trailing one.
struct SubbandPartition {
    std::vector<SubcarrierRange> subbands;
    int sbs_rbs = 1;

    std::size_t size() const { return subbands.size(); }
};

SubbandPartition partition(const GridSpec& spec, int sbs_rbs);

/// Sub-band covariance (mean of H^H H over its subcarriers) and its dominant
/// eigenpair.
struct SubbandStats {
    CMat cov;
    double sigma = 0.0;
    CVec v;
};

SubbandStats stats_from_cov(CMat cov);
SubbandStats subband_stats(const ChannelGrid& grid, SubcarrierRange range);

/// Stats for every sub-band of `part` plus the whole-band stats, computed in
/// one pass over the grid.
struct RealizationStats {
    std::vector<SubbandStats> subbands;
    SubbandStats wideband;
};

RealizationStats realization_stats(const ChannelGrid& grid, const SubbandPartition& part);

struct SubbandAssignment {
    std::size_t subband_index = 0;
    std::optional<std::size_t> tpmi; ///< empty for the unquantized (SVD) precoder
    double metric = 0.0;             ///< |v^H w|, in [0, 1]
    double post_snr_linear = 0.0;

    bool is_svd() const { return !tpmi.has_value(); }
};

/// Metric-squared values closer than this to the best one count as ties; the
/// lowest TPMI among them wins.
inline constexpr double kTieTolerance = 1e-12;

struct Selection {
    std::optional<std::size_t> tpmi;
    double metric_sq = 0.0;
};

/// Exhaustive search for the entry maximizing |v^H w|. Product-grid codebooks
/// are enumerated with shared partial sums, which produce bit-identical metric
/// values to the plain dot product.
Selection search_precoder(std::span<const cplx> v, const Codebook& cb);

/// Same search, always through plain dot products. Reference path for tests.
Selection search_precoder_dot(std::span<const cplx> v, const Codebook& cb);

SubbandAssignment search_codebook(const SubbandStats& stats, const Codebook& cb);
SubbandAssignment svd_assignment(const SubbandStats& stats);

enum class Mode { SB, WB };

/// Precoder origin for a scheme: a codebook search, or the dominant
/// eigenvector itself when `codebook` is null.
struct PrecoderSource {
    const Codebook* codebook = nullptr;

    bool is_svd() const { return codebook == nullptr; }
};

/// Post-processing SNR  P * sigma * metric^2 / noise_var.
double post_snr(double p_per_subband, double sigma, double metric, double noise_var);

/// Selected weights per sub-band. SB searches each sub-band; WB searches once
/// on the whole-band covariance and repeats that choice.
struct PrecoderPlan {
    std::vector<std::optional<std::size_t>> tpmi;
    std::vector<CVec> weights;
};

PrecoderPlan plan_precoders(const RealizationStats& stats, PrecoderSource src, Mode mode);

/// SB mode searches every sub-band; WB mode searches the whole-band covariance
/// once and evaluates that precoder on each sub-band as |V_l^H w|.
///
/// p_total is the transmit power per subcarrier, so every sub-band receives
/// the same power regardless of how the band is partitioned and SNR is
/// p_total / noise_var for a unit-gain channel.
std::vector<SubbandAssignment> assign_all(const ChannelGrid& grid, const SubbandPartition& part,
                                          PrecoderSource src, Mode mode, double p_total, double noise_var);
std::vector<SubbandAssignment> assign_all(const ChannelGrid& grid, const SubbandPartition& part,
                                          const Codebook& cb, Mode mode, double p_total, double noise_var);
std::vector<SubbandAssignment> assign_from_stats(const RealizationStats& stats, PrecoderSource src, Mode mode,
                                                 double p_total, double noise_var);

} // namespace sbp
