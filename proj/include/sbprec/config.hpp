// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbprec/channel.hpp"
#include "sbprec/codebook.hpp"
#include "sbprec/errors.hpp"
#include "sbprec/linkabs.hpp"
#include "sbprec/precoding.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sbp {

/// Invalid configuration; the message names the offending key.
class ConfigError : public ParameterError {
public:
    explicit ConfigError(const std::string& what) : ParameterError(what) {}
};

enum class SchemeKind { Legacy, Proposed, TypeI, Svd };

/// One precoding scheme of a sweep, written as MODE:KIND[:params], e.g.
/// "WB:legacy", "SB:proposed:3:3:3", "SB:type1:2:2", "SB:svd".
/// A single proposed budget is repeated for every non-reference port.
struct SchemeSpec {
    Mode mode = Mode::SB;
    SchemeKind kind = SchemeKind::Legacy;
    std::vector<int> m_bits;
    int n1 = 4;
    int n2 = 1;

    std::string label() const;
    /// Builds the codebook; throws for Svd.
    Codebook make_codebook(int n_tx) const;
};

SchemeSpec parse_scheme(std::string_view text, int n_tx);

struct SnrSweep {
    double start_db = 0.0;
    double stop_db = 10.0;
    double step_db = 1.0;

    /// Grid points start + i*step up to stop, each rounded to 6 significant
    /// digits so they survive a CSV round trip unchanged.
    std::vector<double> points() const;
};

struct SimConfig {
    GridSpec grid;
    int n_taps = kDefaultTaps;
    double rms_delay_spread_ns = kDefaultRmsSpreadS * 1e9;
    double max_delay_ns = kDefaultMaxDelayS * 1e9;
    int n_rx = 8;
    int n_tx = 2;
    std::vector<SchemeSpec> schemes;
    int sbs_rbs = 1;
    std::vector<int> sbs_list{1, 2, 5, 10, 30, 90, 270};
    SnrSweep snr;
    int n_tbs = 1500;
    std::uint64_t seed = 1;
    McsModel mcs;

    TdlProfile profile() const;
    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Flat "key = value" text; '#' starts a comment; unknown keys are errors.
SimConfig parse_config(std::istream& is);
SimConfig load_config(const std::string& path);

/// Canonical key = value rendering, parseable by parse_config.
std::string to_config_text(const SimConfig& cfg);

double round_sig6(double x);

} // namespace sbp
