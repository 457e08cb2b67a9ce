// SPDX-License-Identifier: Apache-2.0

#include "sbprec/channel.hpp"

#include "sbprec/errors.hpp"
#include "sbprec/rng.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

namespace sbp {

namespace {

double rms_spread(const std::vector<double>& delays, const std::vector<double>& powers)
{
    const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
    double mean = 0.0;
    for (std::size_t k = 0; k < delays.size(); ++k) {
        mean += powers[k] * delays[k];
    }
    mean /= total;
    double var = 0.0;
    for (std::size_t k = 0; k < delays.size(); ++k) {
        const double d = delays[k] - mean;
        var += powers[k] * d * d;
    }
    return std::sqrt(var / total);
}

std::vector<double> exp_powers(const std::vector<double>& delays, double scale)
{
    std::vector<double> p(delays.size());
    for (std::size_t k = 0; k < delays.size(); ++k) {
        p[k] = std::exp(-delays[k] / scale);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) {
        x /= total;
    }
    return p;
}

} // namespace

void GridSpec::validate() const
{
    if (n_rbs < 1) {
        throw ParameterError("grid.n_rbs must be >= 1, got " + std::to_string(n_rbs));
    }
    if (sc_per_rb < 1) {
        throw ParameterError("grid.sc_per_rb must be >= 1, got " + std::to_string(sc_per_rb));
    }
    if (!(scs_hz > 0.0)) {
        throw ParameterError("grid.scs_hz must be positive");
    }
}

double TdlProfile::realized_rms_s() const { return rms_spread(tap_delays_s, tap_powers); }

void TdlProfile::validate() const
{
    if (tap_delays_s.empty() || tap_delays_s.size() != tap_powers.size()) {
        throw ParameterError("TdlProfile: need matching, non-empty delay and power lists");
    }
    if (tap_delays_s.front() != 0.0) {
        throw ParameterError("TdlProfile: first tap delay must be 0");
    }
    for (std::size_t k = 1; k < tap_delays_s.size(); ++k) {
        if (!(tap_delays_s[k] > tap_delays_s[k - 1])) {
            throw ParameterError("TdlProfile: delays must be strictly ascending");
        }
    }
    double total = 0.0;
    for (double p : tap_powers) {
        if (!(p >= 0.0)) {
            throw ParameterError("TdlProfile: negative tap power");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ParameterError("TdlProfile: tap powers must sum to 1");
    }
    if (std::abs(realized_rms_s() - rms_delay_spread_s) > 0.05 * rms_delay_spread_s) {
        throw ParameterError("TdlProfile: realized RMS delay spread is more than 5% off target");
    }
}

TdlProfile exp_pdp(int n_taps, double rms_delay_spread_s, double max_delay_s)
{
    if (n_taps < 2) {
        throw ParameterError("exp_pdp: need at least 2 taps, got " + std::to_string(n_taps));
    }
    if (!(max_delay_s > 0.0)) {
        throw ParameterError("exp_pdp: max_delay_s must be positive");
    }
    if (!(rms_delay_spread_s > 0.0)) {
        throw ParameterError("exp_pdp: rms_delay_spread_s must be positive");
    }

    TdlProfile prof;
    prof.rms_delay_spread_s = rms_delay_spread_s;
    prof.tap_delays_s.resize(static_cast<std::size_t>(n_taps));
    for (int k = 0; k < n_taps; ++k) {
        prof.tap_delays_s[static_cast<std::size_t>(k)] = max_delay_s * k / (n_taps - 1);
    }

    // Equal powers give the largest spread an exponential profile can reach.
    const std::vector<double> uniform(static_cast<std::size_t>(n_taps), 1.0 / n_taps);
    const double max_rms = rms_spread(prof.tap_delays_s, uniform);
    if (std::abs(rms_delay_spread_s - max_rms) <= 1e-9 * max_rms) {
        prof.tap_powers = uniform;
        return prof;
    }
    if (rms_delay_spread_s > max_rms) {
        throw ParameterError("exp_pdp: RMS spread " + std::to_string(rms_delay_spread_s) +
                             " s is not reachable with " + std::to_string(n_taps) + " taps over " +
                             std::to_string(max_delay_s) + " s (max " + std::to_string(max_rms) + " s)");
    }

    // rms(scale) increases monotonically from 0 to max_rms; bisect on log(scale).
    double lo = std::log(max_delay_s * 1e-6);
    double hi = std::log(max_delay_s * 1e6);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = rms_spread(prof.tap_delays_s, exp_powers(prof.tap_delays_s, std::exp(mid)));
        if (r < rms_delay_spread_s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    prof.tap_powers = exp_powers(prof.tap_delays_s, std::exp(0.5 * (lo + hi)));
    return prof;
}

TdlProfile default_profile() { return exp_pdp(kDefaultTaps, kDefaultRmsSpreadS, kDefaultMaxDelayS); }

TdlChannel::TdlChannel(GridSpec spec, TdlProfile profile, int n_rx, int n_tx)
    : spec_(spec), profile_(std::move(profile)), n_rx_(n_rx), n_tx_(n_tx)
{
    spec_.validate();
    profile_.validate();
    if (n_rx < 1 || n_tx < 1 || n_rx > 8 || n_tx > 8) {
        throw ParameterError("TdlChannel: antenna counts must be in 1..8");
    }
    const auto n_sc = static_cast<std::size_t>(spec_.n_subcarriers());
    const std::size_t n_taps = profile_.tap_delays_s.size();
    phasors_.resize(n_sc * n_taps);
    for (std::size_t c = 0; c < n_sc; ++c) {
        const double f = static_cast<double>(c) * spec_.scs_hz;
        for (std::size_t k = 0; k < n_taps; ++k) {
            phasors_[c * n_taps + k] = std::polar(1.0, -2.0 * std::numbers::pi * f * profile_.tap_delays_s[k]);
        }
    }
}

ChannelGrid TdlChannel::realize(std::uint64_t seed, std::uint64_t index) const
{
    const std::size_t n_taps = profile_.tap_delays_s.size();
    const auto n_ant = static_cast<std::size_t>(n_rx_ * n_tx_);

    RngStream rng(seed, StreamPurpose::Channel, index);
    std::vector<cplx> gains(n_taps * n_ant); // [tap][rx][tx]
    for (std::size_t k = 0; k < n_taps; ++k) {
        for (std::size_t a = 0; a < n_ant; ++a) {
            gains[k * n_ant + a] = rng.complex_gaussian(profile_.tap_powers[k]);
        }
    }

    ChannelGrid grid;
    grid.spec = spec_;
    grid.n_rx = n_rx_;
    grid.n_tx = n_tx_;
    const auto n_sc = static_cast<std::size_t>(spec_.n_subcarriers());
    grid.h.reserve(n_sc);
    for (std::size_t c = 0; c < n_sc; ++c) {
        CMat m(static_cast<std::size_t>(n_rx_), static_cast<std::size_t>(n_tx_));
        auto out = m.data();
        const cplx* ph = &phasors_[c * n_taps];
        for (std::size_t k = 0; k < n_taps; ++k) {
            const cplx* g = &gains[k * n_ant];
            for (std::size_t a = 0; a < n_ant; ++a) {
                out[a] += g[a] * ph[k];
            }
        }
        grid.h.push_back(std::move(m));
    }
    return grid;
}

ChannelGrid generate_realization(const GridSpec& spec, const TdlProfile& profile, int n_rx, int n_tx,
                                 std::uint64_t seed)
{
    return TdlChannel(spec, profile, n_rx, n_tx).realize(seed, 0);
}

ChannelGrid fixture(FixtureKind kind, const GridSpec& spec, int n_rx, int n_tx)
{
    spec.validate();
    ChannelGrid grid;
    grid.spec = spec;
    grid.n_rx = n_rx;
    grid.n_tx = n_tx;
    const auto rows = static_cast<std::size_t>(n_rx);
    const auto cols = static_cast<std::size_t>(n_tx);
    const auto n_sc = static_cast<std::size_t>(spec.n_subcarriers());
    grid.h.reserve(n_sc);

    switch (kind) {
    case FixtureKind::Flat: {
        const CMat m(rows, cols, std::vector<cplx>(rows * cols, cplx{1.0, 0.0}));
        grid.h.assign(n_sc, m);
        break;
    }
    case FixtureKind::TwoTap: {
        constexpr double kSecondTapS = 1e-6;
        for (std::size_t c = 0; c < n_sc; ++c) {
            const double f = static_cast<double>(c) * spec.scs_hz;
            const cplx g = (1.0 + std::polar(1.0, -2.0 * std::numbers::pi * f * kSecondTapS)) / std::sqrt(2.0);
            grid.h.emplace_back(rows, cols, std::vector<cplx>(rows * cols, g));
        }
        break;
    }
    case FixtureKind::LineOfSightRank1: {
        const double sin_rx = std::sin(30.0 * std::numbers::pi / 180.0);
        const double sin_tx = std::sin(20.0 * std::numbers::pi / 180.0);
        CMat m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const cplx a = std::polar(1.0, std::numbers::pi * static_cast<double>(r) * sin_rx);
            for (std::size_t t = 0; t < cols; ++t) {
                const cplx b = std::polar(1.0, std::numbers::pi * static_cast<double>(t) * sin_tx);
                m(r, t) = a * std::conj(b);
            }
        }
        grid.h.assign(n_sc, m);
        break;
    }
    }
    return grid;
}

namespace {

static_assert(std::endian::native == std::endian::little, "channel fixture IO assumes little-endian");

constexpr std::array<char, 8> kChannelMagic{'S', 'B', 'P', 'C', 'H', 'A', 'N', '1'};

template <typename T>
void put(std::ostream& os, T value)
{
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is)
{
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw ParameterError("read_channel: truncated input");
    }
    return value;
}

} // namespace

void write_channel(std::ostream& os, const ChannelGrid& grid)
{
    os.write(kChannelMagic.data(), kChannelMagic.size());
    put<std::int32_t>(os, grid.spec.n_rbs);
    put<std::int32_t>(os, grid.spec.sc_per_rb);
    put<std::int32_t>(os, grid.n_rx);
    put<std::int32_t>(os, grid.n_tx);
    put<double>(os, grid.spec.scs_hz);
    for (const auto& m : grid.h) {
        for (const auto& x : m.data()) {
            put<double>(os, x.real());
            put<double>(os, x.imag());
        }
    }
}

ChannelGrid read_channel(std::istream& is)
{
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kChannelMagic) {
        throw ParameterError("read_channel: bad magic");
    }
    ChannelGrid grid;
    grid.spec.n_rbs = get<std::int32_t>(is);
    grid.spec.sc_per_rb = get<std::int32_t>(is);
    grid.n_rx = get<std::int32_t>(is);
    grid.n_tx = get<std::int32_t>(is);
    grid.spec.scs_hz = get<double>(is);
    grid.spec.validate();
    if (grid.n_rx < 1 || grid.n_tx < 1 || grid.n_rx > 8 || grid.n_tx > 8) {
        throw ParameterError("read_channel: antenna counts out of range");
    }
    const auto rows = static_cast<std::size_t>(grid.n_rx);
    const auto cols = static_cast<std::size_t>(grid.n_tx);
    const auto n_sc = static_cast<std::size_t>(grid.spec.n_subcarriers());
    grid.h.reserve(n_sc);
    for (std::size_t c = 0; c < n_sc; ++c) {
        CMat m(rows, cols);
        for (auto& x : m.data()) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            x = {re, im};
        }
        grid.h.push_back(std::move(m));
    }
    return grid;
}

} // namespace sbp
