// SPDX-License-Identifier: Apache-2.0

#include "sbprec/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace sbp {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const auto t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "' as a number");
    }
    return value;
}

std::string fmt_double(double x)
{
    std::array<char, 64> buf{};
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), r.ptr);
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text)
{
    std::vector<int> out;
    for (auto tok : split(text, ',')) {
        out.push_back(parse_number<int>(key, tok));
    }
    return out;
}

} // namespace

double round_sig6(double x)
{
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", x);
    return std::strtod(buf.data(), nullptr);
}

std::string SchemeSpec::label() const
{
    std::string s = mode == Mode::SB ? "SB:" : "WB:";
    switch (kind) {
    case SchemeKind::Legacy: s += "legacy"; break;
    case SchemeKind::Svd: s += "svd"; break;
    case SchemeKind::TypeI: s += "type1:" + std::to_string(n1) + ":" + std::to_string(n2); break;
    case SchemeKind::Proposed:
        s += "proposed";
        for (int m : m_bits) {
            s += ":" + std::to_string(m);
        }
        break;
    }
    return s;
}

Codebook SchemeSpec::make_codebook(int n_tx) const
{
    switch (kind) {
    case SchemeKind::Legacy: return legacy_codebook(n_tx);
    case SchemeKind::Proposed: return proposed_codebook(n_tx, m_bits);
    case SchemeKind::TypeI:
        if (n_tx != 8) {
            throw ConfigError("scheme " + label() + ": type1 codebooks need n_tx = 8");
        }
        return type1_8tx_codebook(n1, n2);
    case SchemeKind::Svd: break;
    }
    throw ConfigError("scheme " + label() + " has no codebook");
}

SchemeSpec parse_scheme(std::string_view text, int n_tx)
{
    const auto parts = split(trim(text), ':');
    auto fail = [&](const std::string& why) {
        return ConfigError("schemes: '" + std::string(text) + "': " + why);
    };
    if (parts.size() < 2) {
        throw fail("expected MODE:KIND[:params]");
    }
    SchemeSpec s;
    if (parts[0] == "SB") {
        s.mode = Mode::SB;
    } else if (parts[0] == "WB") {
        s.mode = Mode::WB;
    } else {
        throw fail("mode must be SB or WB");
    }

    std::vector<int> params;
    for (std::size_t i = 2; i < parts.size(); ++i) {
        params.push_back(parse_number<int>("schemes", parts[i]));
    }

    if (parts[1] == "legacy" || parts[1] == "svd") {
        s.kind = parts[1] == "legacy" ? SchemeKind::Legacy : SchemeKind::Svd;
        if (!params.empty()) {
            throw fail("takes no parameters");
        }
    } else if (parts[1] == "proposed") {
        s.kind = SchemeKind::Proposed;
        if (params.size() == 1) {
            params.assign(static_cast<std::size_t>(std::max(n_tx - 1, 1)), params.front());
        }
        if (params.size() != static_cast<std::size_t>(n_tx - 1)) {
            throw fail("needs 1 or " + std::to_string(n_tx - 1) + " phase budgets");
        }
        for (int m : params) {
            if (m < 0 || m > 16) {
                throw fail("phase budgets must be in 0..16");
            }
        }
        s.m_bits = std::move(params);
    } else if (parts[1] == "type1") {
        s.kind = SchemeKind::TypeI;
        if (params.size() != 2) {
            throw fail("needs n1:n2");
        }
        s.n1 = params[0];
        s.n2 = params[1];
    } else {
        throw fail("unknown kind '" + std::string(parts[1]) + "'");
    }
    return s;
}

std::vector<double> SnrSweep::points() const
{
    std::vector<double> out;
    const double span = (stop_db - start_db) / step_db;
    const auto n = static_cast<long>(std::floor(span + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(std::max(n, 0L)));
    for (long i = 0; i < n; ++i) {
        out.push_back(round_sig6(start_db + static_cast<double>(i) * step_db));
    }
    return out;
}

TdlProfile SimConfig::profile() const
{
    return exp_pdp(n_taps, rms_delay_spread_ns * 1e-9, max_delay_ns * 1e-9);
}

void SimConfig::validate() const
{
    try {
        grid.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (n_tx != 2 && n_tx != 4 && n_tx != 8) {
        throw ConfigError("n_tx: must be 2, 4 or 8, got " + std::to_string(n_tx));
    }
    if (n_rx < 1 || n_rx > 8) {
        throw ConfigError("n_rx: must be in 1..8, got " + std::to_string(n_rx));
    }
    if (n_tbs < 1) {
        throw ConfigError("n_tbs: must be >= 1");
    }
    if (!(snr.step_db > 0.0)) {
        throw ConfigError("snr.step_db: must be positive");
    }
    if (snr.stop_db < snr.start_db) {
        throw ConfigError("snr.stop_db: must not be below snr.start_db");
    }
    if (sbs_rbs < 1 || sbs_rbs > grid.n_rbs) {
        throw ConfigError("sbs_rbs: must be in 1.." + std::to_string(grid.n_rbs));
    }
    for (int s : sbs_list) {
        if (s < 1 || s > grid.n_rbs) {
            throw ConfigError("sbs_list: " + std::to_string(s) + " is outside 1.." + std::to_string(grid.n_rbs));
        }
    }
    try {
        mcs.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    try {
        profile();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("channel: ") + e.what());
    }
    for (const auto& s : schemes) {
        if (s.kind == SchemeKind::Svd) {
            continue;
        }
        try {
            s.make_codebook(n_tx);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("schemes: " + s.label() + ": " + e.what());
        }
    }
}

SimConfig parse_config(std::istream& is)
{
    SimConfig cfg;
    std::map<std::string, std::string> raw;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = trim(body);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (raw.count(key)) {
            throw ConfigError(key + ": given more than once");
        }
        raw.emplace(std::move(key), std::move(value));
    }

    using Setter = std::function<void(const std::string&, std::string_view)>;
    const std::map<std::string, Setter> setters{
        {"grid.n_rbs", [&](auto& k, auto v) { cfg.grid.n_rbs = parse_number<int>(k, v); }},
        {"grid.sc_per_rb", [&](auto& k, auto v) { cfg.grid.sc_per_rb = parse_number<int>(k, v); }},
        {"grid.scs_hz", [&](auto& k, auto v) { cfg.grid.scs_hz = parse_number<double>(k, v); }},
        {"channel.n_taps", [&](auto& k, auto v) { cfg.n_taps = parse_number<int>(k, v); }},
        {"channel.rms_delay_spread_ns", [&](auto& k, auto v) { cfg.rms_delay_spread_ns = parse_number<double>(k, v); }},
        {"channel.max_delay_ns", [&](auto& k, auto v) { cfg.max_delay_ns = parse_number<double>(k, v); }},
        {"n_rx", [&](auto& k, auto v) { cfg.n_rx = parse_number<int>(k, v); }},
        {"n_tx", [&](auto& k, auto v) { cfg.n_tx = parse_number<int>(k, v); }},
        {"sbs_rbs", [&](auto& k, auto v) { cfg.sbs_rbs = parse_number<int>(k, v); }},
        {"sbs_list", [&](auto& k, auto v) { cfg.sbs_list = parse_int_list(k, v); }},
        {"snr.start_db", [&](auto& k, auto v) { cfg.snr.start_db = parse_number<double>(k, v); }},
        {"snr.stop_db", [&](auto& k, auto v) { cfg.snr.stop_db = parse_number<double>(k, v); }},
        {"snr.step_db", [&](auto& k, auto v) { cfg.snr.step_db = parse_number<double>(k, v); }},
        {"n_tbs", [&](auto& k, auto v) { cfg.n_tbs = parse_number<int>(k, v); }},
        {"seed", [&](auto& k, auto v) { cfg.seed = parse_number<std::uint64_t>(k, v); }},
        {"mcs.spectral_eff_bits", [&](auto& k, auto v) { cfg.mcs.spectral_eff_bits = parse_number<double>(k, v); }},
        {"mcs.shannon_gap_db", [&](auto& k, auto v) { cfg.mcs.shannon_gap_db = parse_number<double>(k, v); }},
        {"mcs.transition_slope", [&](auto& k, auto v) { cfg.mcs.transition_slope = parse_number<double>(k, v); }},
        {"schemes", [](auto&, auto) {}},
    };

    for (const auto& [key, value] : raw) {
        auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(key + ": unknown key");
        }
        it->second(key, value);
    }
    if (!raw.count("sbs_list")) {
        std::erase_if(cfg.sbs_list, [&](int s) { return s > cfg.grid.n_rbs; });
        if (cfg.sbs_list.empty() || cfg.sbs_list.back() != cfg.grid.n_rbs) {
            cfg.sbs_list.push_back(cfg.grid.n_rbs);
        }
    }
    // schemes depend on n_tx, so they are parsed after every scalar key
    if (auto it = raw.find("schemes"); it != raw.end() && !trim(it->second).empty()) {
        for (auto tok : split(it->second, ',')) {
            cfg.schemes.push_back(parse_scheme(tok, cfg.n_tx));
        }
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

std::string to_config_text(const SimConfig& cfg)
{
    std::ostringstream os;
    os << "grid.n_rbs = " << cfg.grid.n_rbs << '\n'
       << "grid.sc_per_rb = " << cfg.grid.sc_per_rb << '\n'
       << "grid.scs_hz = " << fmt_double(cfg.grid.scs_hz) << '\n'
       << "channel.n_taps = " << cfg.n_taps << '\n'
       << "channel.rms_delay_spread_ns = " << fmt_double(cfg.rms_delay_spread_ns) << '\n'
       << "channel.max_delay_ns = " << fmt_double(cfg.max_delay_ns) << '\n'
       << "n_rx = " << cfg.n_rx << '\n'
       << "n_tx = " << cfg.n_tx << '\n'
       << "schemes = ";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
        os << (i ? ", " : "") << cfg.schemes[i].label();
    }
    os << '\n' << "sbs_rbs = " << cfg.sbs_rbs << '\n' << "sbs_list = ";
    for (std::size_t i = 0; i < cfg.sbs_list.size(); ++i) {
        os << (i ? ", " : "") << cfg.sbs_list[i];
    }
    os << '\n'
       << "snr.start_db = " << fmt_double(cfg.snr.start_db) << '\n'
       << "snr.stop_db = " << fmt_double(cfg.snr.stop_db) << '\n'
       << "snr.step_db = " << fmt_double(cfg.snr.step_db) << '\n'
       << "n_tbs = " << cfg.n_tbs << '\n'
       << "seed = " << cfg.seed << '\n'
       << "mcs.spectral_eff_bits = " << fmt_double(cfg.mcs.spectral_eff_bits) << '\n'
       << "mcs.shannon_gap_db = " << fmt_double(cfg.mcs.shannon_gap_db) << '\n'
       << "mcs.transition_slope = " << fmt_double(cfg.mcs.transition_slope) << '\n';
    return os.str();
}

} // namespace sbp
