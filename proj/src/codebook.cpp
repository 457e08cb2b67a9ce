// SPDX-License-Identifier: Apache-2.0

#include "sbprec/codebook.hpp"

#include "sbprec/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sbp {

namespace {

// e^{j 2 pi num / den}, exact for multiples of a quarter turn.
cplx unit_phasor(long num, long den)
{
    const long r = ((num % den) + den) % den;
    if ((4 * r) % den == 0) {
        switch ((4 * r) / den) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den));
}

// Fully coherent rows of the 4-port single-layer table for transform precoding
// disabled, 3GPP TS 38.211 Table 6.3.1.5-3, TPMI 12..27. Each row lists the
// exponents k of j^k for ports 1..3 (port 0 is always 1); the table scales
// every matrix by 1/2.
constexpr std::array<std::array<int, 3>, 16> kLegacy4TxExponents{{
    {0, 0, 0}, {0, 1, 1}, {0, 2, 2}, {0, 3, 3},
    {1, 0, 1}, {1, 1, 2}, {1, 2, 3}, {1, 3, 0},
    {2, 0, 2}, {2, 1, 3}, {2, 2, 0}, {2, 3, 1},
    {3, 0, 3}, {3, 1, 0}, {3, 2, 1}, {3, 3, 2},
}};

void check_n_tx(int n_tx, const char* where)
{
    if (n_tx != 2 && n_tx != 4 && n_tx != 8) {
        throw StructuralError(std::string(where) + ": n_tx must be 2, 4 or 8, got " +
                              std::to_string(n_tx));
    }
}

// Generic linear projection used to sort weight vectors; entries within tol of
// each other land within window(tol) of each other in this key.
struct Projector {
    explicit Projector(std::size_t n) : coeff(n)
    {
        for (std::size_t i = 0; i < n; ++i) {
            coeff[i] = {std::cos(1.7 + 0.37 * static_cast<double>(i)),
                        std::sin(0.9 + 0.61 * static_cast<double>(i))};
        }
    }
    double key(std::span<const cplx> w) const
    {
        double k = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            k += (coeff[i] * w[i]).real();
        }
        return k;
    }
    double window(double tol) const
    {
        double s = 0.0;
        for (const auto& c : coeff) {
            s += std::abs(c.real()) + std::abs(c.imag());
        }
        return s * tol * 1.000001;
    }
    CVec coeff;
};

double max_entry_distance(std::span<const cplx> a, std::span<const cplx> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace

std::string_view family_name(Family f)
{
    switch (f) {
    case Family::Legacy: return "legacy";
    case Family::TypeI8Tx: return "type1";
    case Family::Proposed: return "proposed";
    }
    return "unknown";
}

Family parse_family(std::string_view name)
{
    if (name == "legacy") return Family::Legacy;
    if (name == "type1") return Family::TypeI8Tx;
    if (name == "proposed") return Family::Proposed;
    throw ParameterError("unknown codebook family '" + std::string(name) + "'");
}

Codebook::Codebook(int n_tx, Family family, std::vector<CVec> weights) : n_tx_(n_tx), family_(family)
{
    check_n_tx(n_tx, "Codebook");
    entries_.reserve(weights.size());
    flat_.reserve(weights.size() * static_cast<std::size_t>(n_tx));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].size() != static_cast<std::size_t>(n_tx)) {
            throw StructuralError("Codebook: entry " + std::to_string(i) + " has " +
                                  std::to_string(weights[i].size()) + " ports, expected " +
                                  std::to_string(n_tx));
        }
        flat_.insert(flat_.end(), weights[i].begin(), weights[i].end());
        entries_.push_back({std::move(weights[i]), i});
    }
}

Codebook proposed_codebook(int n_tx, std::span<const int> m_bits)
{
    check_n_tx(n_tx, "proposed_codebook");
    if (m_bits.size() != static_cast<std::size_t>(n_tx - 1)) {
        throw StructuralError("proposed_codebook: " + std::to_string(n_tx) + " ports need " +
                              std::to_string(n_tx - 1) + " phase budgets, got " +
                              std::to_string(m_bits.size()));
    }
    int total_bits = 0;
    for (int m : m_bits) {
        if (m < 0) {
            throw ParameterError("proposed_codebook: negative phase budget");
        }
        total_bits += m;
    }
    if (total_bits > 24) {
        throw ParameterError("proposed_codebook: 2^" + std::to_string(total_bits) +
                             " entries is more than this implementation enumerates");
    }

    const double amp = 1.0 / std::sqrt(static_cast<double>(n_tx));
    std::vector<CVec> ports;
    ports.push_back({cplx{amp, 0.0}});
    for (int m : m_bits) {
        const long count = 1L << m;
        CVec table(static_cast<std::size_t>(count));
        for (long k = 0; k < count; ++k) {
            table[static_cast<std::size_t>(k)] = amp * unit_phasor(k, count);
        }
        ports.push_back(std::move(table));
    }

    const std::size_t size = std::size_t{1} << total_bits;
    std::vector<CVec> weights;
    weights.reserve(size);
    std::vector<std::size_t> digit(ports.size(), 0);
    for (std::size_t tpmi = 0; tpmi < size; ++tpmi) {
        CVec w(ports.size());
        for (std::size_t p = 0; p < ports.size(); ++p) {
            w[p] = ports[p][digit[p]];
        }
        weights.push_back(std::move(w));
        // odometer: last port varies fastest
        for (std::size_t p = ports.size(); p-- > 1;) {
            if (++digit[p] < ports[p].size()) {
                break;
            }
            digit[p] = 0;
        }
    }

    Codebook cb(n_tx, Family::Proposed, std::move(weights));
    cb.m_bits_.assign(m_bits.begin(), m_bits.end());
    cb.port_phasors_ = std::move(ports);
    return cb;
}

Codebook type1_8tx_codebook(int n1, int n2)
{
    if (n1 < 1 || n2 < 1 || n1 * n2 != 4) {
        throw StructuralError("type1_8tx_codebook: n1*n2 must equal 4, got n1=" + std::to_string(n1) +
                              " n2=" + std::to_string(n2));
    }
    const double amp = 1.0 / (2.0 * std::sqrt(2.0));
    std::vector<CVec> weights;
    weights.reserve(16);
    for (int ih = 0; ih < n1; ++ih) {
        CVec vh(static_cast<std::size_t>(n1));
        for (int k = 0; k < n1; ++k) {
            vh[static_cast<std::size_t>(k)] = unit_phasor(static_cast<long>(ih) * k, n1);
        }
        for (int iv = 0; iv < n2; ++iv) {
            CVec vv(static_cast<std::size_t>(n2));
            for (int k = 0; k < n2; ++k) {
                vv[static_cast<std::size_t>(k)] = unit_phasor(static_cast<long>(iv) * k, n2);
            }
            const CVec v = kron(vh, vv);
            for (int n = 0; n < 4; ++n) {
                const cplx phi = unit_phasor(n, 4);
                CVec w;
                w.reserve(8);
                for (const auto& x : v) {
                    w.push_back(amp * x);
                }
                for (const auto& x : v) {
                    w.push_back(amp * (phi * x));
                }
                weights.push_back(std::move(w));
            }
        }
    }
    Codebook cb(8, Family::TypeI8Tx, std::move(weights));
    cb.n1_ = n1;
    cb.n2_ = n2;
    return cb;
}

Codebook legacy_codebook(int n_tx)
{
    check_n_tx(n_tx, "legacy_codebook");
    if (n_tx == 2) {
        const std::array<int, 1> bits{2};
        Codebook cb = proposed_codebook(2, bits);
        cb.family_ = Family::Legacy;
        return cb;
    }
    if (n_tx == 8) {
        Codebook cb = type1_8tx_codebook(4, 1);
        cb.family_ = Family::Legacy;
        return cb;
    }
    std::vector<CVec> weights;
    weights.reserve(kLegacy4TxExponents.size());
    for (const auto& row : kLegacy4TxExponents) {
        CVec w{cplx{0.5, 0.0}};
        for (int k : row) {
            w.push_back(0.5 * unit_phasor(k, 4));
        }
        weights.push_back(std::move(w));
    }
    return Codebook(4, Family::Legacy, std::move(weights));
}

bool is_superset(const Codebook& big, const Codebook& small, double tol)
{
    if (big.n_tx() != small.n_tx()) {
        throw StructuralError("is_superset: n_tx mismatch (" + std::to_string(big.n_tx()) + " vs " +
                              std::to_string(small.n_tx()) + ")");
    }
    const Projector proj(static_cast<std::size_t>(big.n_tx()));
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(big.size());
    for (const auto& p : big.entries()) {
        keyed.emplace_back(proj.key(p.weights), p.index);
    }
    std::sort(keyed.begin(), keyed.end());
    const double win = proj.window(tol);

    for (const auto& p : small.entries()) {
        const double k = proj.key(p.weights);
        auto it = std::lower_bound(keyed.begin(), keyed.end(), std::pair{k - win, std::size_t{0}});
        bool found = false;
        for (; it != keyed.end() && it->first <= k + win; ++it) {
            if (max_entry_distance(big[it->second].weights, p.weights) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) {
            return false;
        }
    }
    return true;
}

CodebookCheck validate(const Codebook& cb, double tol, double dup_tol)
{
    const double amp = 1.0 / std::sqrt(static_cast<double>(cb.n_tx()));
    for (const auto& p : cb.entries()) {
        const std::string tag = "entry " + std::to_string(p.index) + ": ";
        if (std::abs(norm(p.weights) - 1.0) > tol) {
            return {false, tag + "norm is not 1"};
        }
        for (const auto& x : p.weights) {
            if (std::abs(std::abs(x) - amp) > tol) {
                return {false, tag + "modulus differs from 1/sqrt(n_tx)"};
            }
        }
        if (std::abs(p.weights[0] - cplx{amp, 0.0}) > tol) {
            return {false, tag + "first entry is not 1/sqrt(n_tx)"};
        }
    }

    const Projector proj(static_cast<std::size_t>(cb.n_tx()));
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(cb.size());
    for (const auto& p : cb.entries()) {
        keyed.emplace_back(proj.key(p.weights), p.index);
    }
    std::sort(keyed.begin(), keyed.end());
    const double win = proj.window(dup_tol);
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        for (std::size_t j = i + 1; j < keyed.size() && keyed[j].first - keyed[i].first <= win; ++j) {
            if (max_entry_distance(cb[keyed[i].second].weights, cb[keyed[j].second].weights) <= dup_tol) {
                return {false, "entries " + std::to_string(keyed[i].second) + " and " +
                                   std::to_string(keyed[j].second) + " coincide"};
            }
        }
    }
    return {};
}

std::string format_complex(cplx z)
{
    std::array<char, 64> buf{};
    auto r1 = std::to_chars(buf.data(), buf.data() + buf.size(), z.real());
    std::string out(buf.data(), r1.ptr);
    const bool neg = std::signbit(z.imag());
    out += neg ? '-' : '+';
    auto r2 = std::to_chars(buf.data(), buf.data() + buf.size(), std::abs(z.imag()));
    out.append(buf.data(), r2.ptr);
    out += 'j';
    return out;
}

cplx parse_complex(std::string_view token)
{
    auto fail = [&] { return ParameterError("malformed complex value '" + std::string(token) + "'"); };
    if (token.size() < 4 || token.back() != 'j') {
        throw fail();
    }
    // split at the last sign that is not the leading sign and not an exponent sign
    std::size_t split = std::string_view::npos;
    for (std::size_t i = token.size() - 1; i-- > 1;) {
        if ((token[i] == '+' || token[i] == '-') && token[i - 1] != 'e' && token[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) {
        throw fail();
    }
    double re = 0.0;
    double im = 0.0;
    const char* first = token.data();
    auto r1 = std::from_chars(first, first + split, re);
    if (r1.ec != std::errc{} || r1.ptr != first + split) {
        throw fail();
    }
    const char* im_begin = first + split + 1;
    const char* im_end = first + token.size() - 1;
    auto r2 = std::from_chars(im_begin, im_end, im);
    if (r2.ec != std::errc{} || r2.ptr != im_end) {
        throw fail();
    }
    return {re, token[split] == '-' ? -im : im};
}

void write_codebook(std::ostream& os, const Codebook& cb)
{
    os << cb.n_tx() << ' ' << family_name(cb.family()) << ' ' << cb.size() << '\n';
    for (const auto& p : cb.entries()) {
        for (std::size_t i = 0; i < p.weights.size(); ++i) {
            if (i != 0) {
                os << ' ';
            }
            os << format_complex(p.weights[i]);
        }
        os << '\n';
    }
}

Codebook read_codebook(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header)) {
        throw ParameterError("read_codebook: missing header line");
    }
    std::istringstream hs(header);
    int n_tx = 0;
    std::string family;
    std::size_t count = 0;
    if (!(hs >> n_tx >> family >> count)) {
        throw ParameterError("read_codebook: malformed header '" + header + "'");
    }
    std::vector<CVec> weights;
    weights.reserve(count);
    std::string line;
    while (weights.size() < count && std::getline(is, line)) {
        std::istringstream ls(line);
        CVec w;
        std::string tok;
        while (ls >> tok) {
            w.push_back(parse_complex(tok));
        }
        weights.push_back(std::move(w));
    }
    if (weights.size() != count) {
        throw ParameterError("read_codebook: expected " + std::to_string(count) + " entries, got " +
                             std::to_string(weights.size()));
    }
    return Codebook(n_tx, parse_family(family), std::move(weights));
}

} // namespace sbp
