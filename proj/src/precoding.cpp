// SPDX-License-Identifier: Apache-2.0

#include "sbprec/precoding.hpp"

#include "sbprec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbp {

SubbandPartition partition(const GridSpec& spec, int sbs_rbs)
{
    spec.validate();
    if (sbs_rbs < 1 || sbs_rbs > spec.n_rbs) {
        throw ParameterError("sub-band size must be in 1.." + std::to_string(spec.n_rbs) + " RBs, got " +
                             std::to_string(sbs_rbs));
    }
    SubbandPartition part;
    part.sbs_rbs = sbs_rbs;
    const auto n_sc = static_cast<std::size_t>(spec.n_subcarriers());
    const auto width = static_cast<std::size_t>(sbs_rbs * spec.sc_per_rb);
    for (std::size_t b = 0; b < n_sc; b += width) {
        part.subbands.push_back({b, std::min(b + width, n_sc)});
    }
    return part;
}

namespace {

void check_range(const ChannelGrid& grid, SubcarrierRange range)
{
    if (range.size() == 0 || range.end < range.begin) {
        throw ParameterError("sub-band range is empty");
    }
    if (range.end > grid.h.size()) {
        throw ParameterError("sub-band range [" + std::to_string(range.begin) + ", " + std::to_string(range.end) +
                             ") exceeds the grid's " + std::to_string(grid.h.size()) + " subcarriers");
    }
}

CMat sum_gram(const ChannelGrid& grid, SubcarrierRange range)
{
    const auto n = static_cast<std::size_t>(grid.n_tx);
    CMat acc(n, n);
    for (std::size_t c = range.begin; c < range.end; ++c) {
        accumulate_gram(grid.h[c], acc);
    }
    return acc;
}

std::vector<double>& scratch_norms(std::size_t n)
{
    thread_local std::vector<double> buf;
    buf.resize(n);
    return buf;
}

Selection pick(std::span<const double> norms)
{
    const double best = *std::max_element(norms.begin(), norms.end());
    const double floor = best - kTieTolerance;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] >= floor) {
            return {i, norms[i]};
        }
    }
    return {};
}

void check_dims(std::span<const cplx> v, const Codebook& cb)
{
    if (v.size() != static_cast<std::size_t>(cb.n_tx())) {
        throw StructuralError("codebook search: vector has " + std::to_string(v.size()) + " ports, codebook has " +
                              std::to_string(cb.n_tx()));
    }
}

} // namespace

SubbandStats stats_from_cov(CMat cov)
{
    SubbandStats s;
    EigPair eig = herm_dominant_eigpair(cov);
    s.sigma = eig.value;
    s.v = std::move(eig.vector);
    s.cov = std::move(cov);
    return s;
}

SubbandStats subband_stats(const ChannelGrid& grid, SubcarrierRange range)
{
    check_range(grid, range);
    CMat cov = sum_gram(grid, range);
    cov *= 1.0 / static_cast<double>(range.size());
    return stats_from_cov(std::move(cov));
}

RealizationStats realization_stats(const ChannelGrid& grid, const SubbandPartition& part)
{
    const auto n = static_cast<std::size_t>(grid.n_tx);
    RealizationStats out;
    out.subbands.reserve(part.size());
    CMat total(n, n);
    std::size_t count = 0;
    for (const auto& range : part.subbands) {
        check_range(grid, range);
        CMat cov = sum_gram(grid, range);
        total += cov;
        count += range.size();
        cov *= 1.0 / static_cast<double>(range.size());
        out.subbands.push_back(stats_from_cov(std::move(cov)));
    }
    total *= 1.0 / static_cast<double>(count);
    out.wideband = stats_from_cov(std::move(total));
    return out;
}

Selection search_precoder_dot(std::span<const cplx> v, const Codebook& cb)
{
    check_dims(v, cb);
    const std::size_t n = v.size();
    auto& norms = scratch_norms(cb.size());
    const auto flat = cb.flat_weights();
    for (std::size_t e = 0; e < cb.size(); ++e) {
        const cplx* w = flat.data() + e * n;
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            acc += conj_mul(v[i], w[i]);
        }
        norms[e] = acc.real() * acc.real() + acc.imag() * acc.imag();
    }
    return pick(norms);
}

Selection search_precoder(std::span<const cplx> v, const Codebook& cb)
{
    if (!cb.is_product_grid()) {
        return search_precoder_dot(v, cb);
    }
    check_dims(v, cb);
    const auto& ports = cb.port_phasors();
    const std::size_t n = ports.size();

    // terms[i][m] = conj(v_i) * w_i(m), the same products the dot path forms
    std::vector<CVec> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i].resize(ports[i].size());
        for (std::size_t m = 0; m < ports[i].size(); ++m) {
            terms[i][m] = conj_mul(v[i], ports[i][m]);
        }
    }

    auto& norms = scratch_norms(cb.size());
    // partial[i] = sum over ports 0..i, accumulated left to right from zero
    std::vector<cplx> partial(n);
    std::vector<std::size_t> digit(n, 0);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc += terms[i][0];
        partial[i] = acc;
    }

    const CVec& last = terms[n - 1];
    std::size_t tpmi = 0;
    while (true) {
        const cplx base = partial[n - 2];
        for (const auto& t : last) {
            cplx s = base;
            s += t;
            norms[tpmi++] = s.real() * s.real() + s.imag() * s.imag();
        }
        // advance the odometer over ports 1..n-2
        std::size_t p = n - 1;
        while (p-- > 1) {
            if (++digit[p] < terms[p].size()) {
                break;
            }
            digit[p] = 0;
        }
        if (p == 0) {
            break;
        }
        for (std::size_t i = p; i + 1 < n; ++i) {
            cplx s = partial[i - 1];
            s += terms[i][digit[i]];
            partial[i] = s;
        }
    }
    return pick(norms);
}

SubbandAssignment search_codebook(const SubbandStats& stats, const Codebook& cb)
{
    const Selection sel = search_precoder(stats.v, cb);
    SubbandAssignment a;
    a.tpmi = sel.tpmi;
    a.metric = std::min(1.0, std::sqrt(sel.metric_sq));
    return a;
}

SubbandAssignment svd_assignment(const SubbandStats& /*stats*/)
{
    SubbandAssignment a;
    a.metric = 1.0;
    return a;
}

double post_snr(double p_per_subband, double sigma, double metric, double noise_var)
{
    return p_per_subband * sigma * metric * metric / noise_var;
}

PrecoderPlan plan_precoders(const RealizationStats& stats, PrecoderSource src, Mode mode)
{
    PrecoderPlan plan;
    const std::size_t n_sb = stats.subbands.size();
    plan.tpmi.reserve(n_sb);
    plan.weights.reserve(n_sb);

    auto choose = [&](const SubbandStats& s) {
        if (src.is_svd()) {
            plan.tpmi.emplace_back();
            plan.weights.push_back(s.v);
        } else {
            const Selection sel = search_precoder(s.v, *src.codebook);
            plan.tpmi.push_back(sel.tpmi);
            plan.weights.push_back((*src.codebook)[*sel.tpmi].weights);
        }
    };

    if (mode == Mode::SB) {
        for (const auto& s : stats.subbands) {
            choose(s);
        }
    } else {
        choose(stats.wideband);
        plan.tpmi.assign(n_sb, plan.tpmi.front());
        plan.weights.assign(n_sb, plan.weights.front());
    }
    return plan;
}

std::vector<SubbandAssignment> assign_from_stats(const RealizationStats& stats, PrecoderSource src, Mode mode,
                                                 double p_total, double noise_var)
{
    if (!(p_total > 0.0)) {
        throw ParameterError("p_total must be positive");
    }
    if (!(noise_var > 0.0)) {
        throw ParameterError("noise_var must be positive");
    }
    if (src.codebook != nullptr && !stats.subbands.empty() &&
        stats.subbands.front().v.size() != static_cast<std::size_t>(src.codebook->n_tx())) {
        throw StructuralError("assign_all: codebook n_tx does not match the channel");
    }

    std::vector<SubbandAssignment> out;
    out.reserve(stats.subbands.size());
    if (mode == Mode::SB) {
        for (std::size_t l = 0; l < stats.subbands.size(); ++l) {
            const SubbandStats& s = stats.subbands[l];
            SubbandAssignment a = src.is_svd() ? svd_assignment(s) : search_codebook(s, *src.codebook);
            a.subband_index = l;
            a.post_snr_linear = post_snr(p_total, s.sigma, a.metric, noise_var);
            out.push_back(a);
        }
        return out;
    }

    const PrecoderPlan plan = plan_precoders(stats, src, Mode::WB);
    for (std::size_t l = 0; l < stats.subbands.size(); ++l) {
        const SubbandStats& s = stats.subbands[l];
        SubbandAssignment a;
        a.subband_index = l;
        a.tpmi = plan.tpmi[l];
        a.metric = std::min(1.0, std::abs(inner(s.v, plan.weights[l])));
        a.post_snr_linear = post_snr(p_total, s.sigma, a.metric, noise_var);
        out.push_back(a);
    }
    return out;
}

std::vector<SubbandAssignment> assign_all(const ChannelGrid& grid, const SubbandPartition& part,
                                          PrecoderSource src, Mode mode, double p_total, double noise_var)
{
    return assign_from_stats(realization_stats(grid, part), src, mode, p_total, noise_var);
}

std::vector<SubbandAssignment> assign_all(const ChannelGrid& grid, const SubbandPartition& part,
                                          const Codebook& cb, Mode mode, double p_total, double noise_var)
{
    return assign_all(grid, part, PrecoderSource{&cb}, mode, p_total, noise_var);
}

} // namespace sbp
