// SPDX-License-Identifier: Apache-2.0

#include "sbprec/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sbp {

namespace {

std::string sig6(double x)
{
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.6g", x);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

} // namespace

void write_csv(std::ostream& os, const SweepResult& result)
{
    struct Row {
        const std::string* scheme;
        const BlerPoint* point;
    };
    std::vector<Row> rows;
    for (const auto& s : result.series) {
        for (const auto& p : s.points) {
            rows.push_back({&s.scheme, &p});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (*a.scheme != *b.scheme) {
            return *a.scheme < *b.scheme;
        }
        return a.point->snr_db < b.point->snr_db;
    });

    os << "scheme,snr_db,trials,errors,bler\n";
    for (const auto& r : rows) {
        os << *r.scheme << ',' << sig6(r.point->snr_db) << ',' << r.point->trials << ',' << r.point->errors << ','
           << sig6(r.point->bler) << '\n';
    }
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_csv(out, result);
    out.flush();
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

SweepResult read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "scheme,snr_db,trials,errors,bler") {
        throw std::runtime_error("read_csv: missing or unexpected header");
    }
    SweepResult result;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<std::string, 5> f;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto next = line.find(',', pos);
            if ((next == std::string::npos) != (i + 1 == f.size())) {
                throw std::runtime_error("read_csv: expected 5 fields in '" + line + "'");
            }
            f[i] = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            pos = next + 1;
        }
        char* end = nullptr;
        const double snr = std::strtod(f[1].c_str(), &end);
        if (end == f[1].c_str() || *end != '\0') {
            throw std::runtime_error("read_csv: bad snr_db '" + f[1] + "'");
        }
        std::int64_t trials = 0;
        std::int64_t errors = 0;
        if (std::from_chars(f[2].data(), f[2].data() + f[2].size(), trials).ec != std::errc{} ||
            std::from_chars(f[3].data(), f[3].data() + f[3].size(), errors).ec != std::errc{}) {
            throw std::runtime_error("read_csv: bad counts in '" + line + "'");
        }
        if (result.series.empty() || result.series.back().scheme != f[0]) {
            result.series.push_back({f[0], {}, 0.0, {}});
        }
        result.series.back().points.push_back(make_bler_point(snr, trials, errors));
    }
    return result;
}

void emit_metadata(const SweepResult& result, const std::filesystem::path& path)
{
    nlohmann::json meta;
    meta["version"] = result.version;
    meta["wall_time_s"] = result.wall_time_s;
    meta["config"] = result.config_echo;
    meta["snr_definition"] =
        "snr_db = 10 log10(p_total / noise_var); p_total is the transmit power per subcarrier, noise_var = 1, "
        "channel normalized to unit average gain per antenna pair";
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : result.series) {
        series.push_back({{"scheme", s.scheme}, {"mean_rb_metric", s.mean_rb_metric}});
    }
    meta["series"] = series;

    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << meta.dump(2) << '\n';
}

} // namespace sbp
