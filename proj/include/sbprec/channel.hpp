// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sbp {

/// OFDM resource grid. Defaults: 270 RBs of 12 subcarriers at 30 kHz.
struct GridSpec {
    int n_rbs = 270;
    int sc_per_rb = 12;
    double scs_hz = 30e3;

    int n_subcarriers() const { return n_rbs * sc_per_rb; }
    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

/// Tapped-delay-line power delay profile.
struct TdlProfile {
    std::vector<double> tap_delays_s;
    std::vector<double> tap_powers;
    double rms_delay_spread_s = 0.0;

    /// RMS delay spread realized by the taps.
    double realized_rms_s() const;
    void validate() const;
};

/// One channel realization: an n_rx x n_tx matrix per subcarrier.
struct ChannelGrid {
    GridSpec spec;
    int n_rx = 0;
    int n_tx = 0;
    std::vector<CMat> h;

    bool operator==(const ChannelGrid&) const = default;
};

inline constexpr int kDefaultTaps = 12;
inline constexpr double kDefaultRmsSpreadS = 300e-9;
inline constexpr double kDefaultMaxDelayS = 2e-6;

/// n_taps equally spaced delays over [0, max_delay_s] with powers
/// proportional to exp(-tau / s), s solved so the RMS delay spread hits the
/// target. A target equal to the uniform-power spread yields equal powers;
/// anything above it is infeasible and raises ParameterError.
TdlProfile exp_pdp(int n_taps, double rms_delay_spread_s, double max_delay_s);

TdlProfile default_profile();

/// Draws i.i.d. Rayleigh taps per (tap, rx, tx) and evaluates the frequency
/// response on the grid. The subcarrier phasors are computed once per
/// instance; realize() is const and safe to call concurrently.
class TdlChannel {
public:
    TdlChannel(GridSpec spec, TdlProfile profile, int n_rx, int n_tx);

    /// Realization `index` of the stream identified by `seed`.
    ChannelGrid realize(std::uint64_t seed, std::uint64_t index) const;

    const GridSpec& spec() const { return spec_; }
    const TdlProfile& profile() const { return profile_; }
    int n_rx() const { return n_rx_; }
    int n_tx() const { return n_tx_; }

private:
    GridSpec spec_;
    TdlProfile profile_;
    int n_rx_;
    int n_tx_;
    std::vector<cplx> phasors_; // [subcarrier][tap] = e^{-j 2 pi f_c tau_k}
};

ChannelGrid generate_realization(const GridSpec& spec, const TdlProfile& profile, int n_rx, int n_tx,
                                 std::uint64_t seed);

enum class FixtureKind { Flat, TwoTap, LineOfSightRank1 };

/// Deterministic test channels:
///  - Flat: every entry 1 on every subcarrier.
///  - TwoTap: unit-gain taps of power 1/2 at 0 and 1 us, all entries equal.
///  - LineOfSightRank1: H = a b^H with unit-modulus half-wavelength steering
///    vectors at 30 deg (rx) and 20 deg (tx), constant over frequency.
ChannelGrid fixture(FixtureKind kind, const GridSpec& spec, int n_rx, int n_tx);

/// Binary fixture format, little-endian: magic "SBPCHAN1", int32 n_rbs,
/// sc_per_rb, n_rx, n_tx, float64 scs_hz, then re/im float64 pairs per
/// subcarrier in row-major order.
void write_channel(std::ostream& os, const ChannelGrid& grid);
ChannelGrid read_channel(std::istream& is);

} // namespace sbp
