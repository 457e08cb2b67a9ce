// SPDX-License-Identifier: Apache-2.0

#include "sbprec/sweep.hpp"

#include "sbprec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace sbp {

namespace {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; the first exception is rethrown after joining.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body)
{
    const auto n_threads = static_cast<std::size_t>(std::clamp<long>(workers, 1, 256));
    if (n_threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(std::min(n_threads, n));
    for (std::size_t k = 0; k < std::min(n_threads, n); ++k) {
        pool.emplace_back(run);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

struct SchemeRuntime {
    SchemeSpec spec;
    std::optional<Codebook> codebook;

    PrecoderSource source() const { return PrecoderSource{codebook ? &*codebook : nullptr}; }
};

std::vector<SchemeRuntime> build_schemes(const SimConfig& cfg)
{
    std::vector<SchemeRuntime> out;
    for (const auto& s : cfg.schemes) {
        SchemeRuntime rt{s, std::nullopt};
        if (s.kind != SchemeKind::Svd) {
            rt.codebook.emplace(s.make_codebook(cfg.n_tx));
        }
        out.push_back(std::move(rt));
    }
    return out;
}

/// Per-RB sums of H^H H for one realization.
struct RbSums {
    std::vector<CMat> sums;
    std::size_t sc_per_rb = 0;
};

RbSums rb_sums(const ChannelGrid& grid)
{
    RbSums out;
    out.sc_per_rb = static_cast<std::size_t>(grid.spec.sc_per_rb);
    const auto n = static_cast<std::size_t>(grid.n_tx);
    const auto n_rbs = static_cast<std::size_t>(grid.spec.n_rbs);
    out.sums.reserve(n_rbs);
    for (std::size_t r = 0; r < n_rbs; ++r) {
        CMat acc(n, n);
        for (std::size_t c = r * out.sc_per_rb; c < (r + 1) * out.sc_per_rb; ++c) {
            accumulate_gram(grid.h[c], acc);
        }
        out.sums.push_back(std::move(acc));
    }
    return out;
}

/// Stats of the sub-band made of RBs [first, last).
SubbandStats merge_rbs(const RbSums& rb, std::size_t first, std::size_t last)
{
    const std::size_t n = rb.sums.front().rows();
    CMat cov(n, n);
    for (std::size_t r = first; r < last; ++r) {
        cov += rb.sums[r];
    }
    cov *= 1.0 / static_cast<double>((last - first) * rb.sc_per_rb);
    return stats_from_cov(std::move(cov));
}

struct TrialOutcome {
    std::vector<std::uint8_t> errors; // [series][snr]
    std::vector<double> metric_sum;   // [series], summed over RBs
};

struct SeriesKey {
    std::size_t sbs_index;
    std::size_t scheme_index;
};

SweepResult run_trials(const SimConfig& cfg, std::span<const int> sbs_list, bool tag_sbs, int workers)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();

    const TdlChannel channel(cfg.grid, cfg.profile(), cfg.n_rx, cfg.n_tx);
    const std::vector<SchemeRuntime> schemes = build_schemes(cfg);
    const std::vector<double> snr_db = cfg.snr.points();
    std::vector<double> snr_lin;
    for (double s : snr_db) {
        snr_lin.push_back(db_to_linear(s));
    }

    std::vector<SeriesKey> keys;
    for (std::size_t b = 0; b < sbs_list.size(); ++b) {
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            keys.push_back({b, s});
        }
    }
    const std::size_t n_series = keys.size();
    const std::size_t n_snr = snr_db.size();
    const auto n_rbs = static_cast<std::size_t>(cfg.grid.n_rbs);

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.n_tbs));
    parallel_for(outcomes.size(), workers, [&](std::size_t t) {
        const ChannelGrid grid = channel.realize(cfg.seed, t);
        const RbSums rb = rb_sums(grid);

        RealizationStats rb_stats;
        rb_stats.subbands.reserve(n_rbs);
        for (std::size_t r = 0; r < n_rbs; ++r) {
            rb_stats.subbands.push_back(merge_rbs(rb, r, r + 1));
        }
        rb_stats.wideband = merge_rbs(rb, 0, n_rbs);

        const double u = RngStream(cfg.seed, StreamPurpose::TbDecision, t).uniform();

        TrialOutcome out;
        out.errors.assign(n_series * n_snr, 0);
        out.metric_sum.assign(n_series, 0.0);

        std::vector<double> gains(n_rbs);
        std::vector<double> gammas(n_rbs);
        for (std::size_t b = 0; b < sbs_list.size(); ++b) {
            const auto sbs = static_cast<std::size_t>(sbs_list[b]);
            RealizationStats coarse;
            const RealizationStats* selection_stats = &rb_stats;
            if (sbs != 1) {
                for (std::size_t first = 0; first < n_rbs; first += sbs) {
                    coarse.subbands.push_back(merge_rbs(rb, first, std::min(first + sbs, n_rbs)));
                }
                coarse.wideband = rb_stats.wideband;
                selection_stats = &coarse;
            }

            for (std::size_t s = 0; s < schemes.size(); ++s) {
                const std::size_t series = b * schemes.size() + s;
                const PrecoderPlan plan = plan_precoders(*selection_stats, schemes[s].source(), schemes[s].spec.mode);
                double metric_sum = 0.0;
                for (std::size_t r = 0; r < n_rbs; ++r) {
                    const SubbandStats& st = rb_stats.subbands[r];
                    const double metric = std::min(1.0, std::abs(inner(st.v, plan.weights[r / sbs])));
                    metric_sum += metric;
                    gains[r] = st.sigma * metric * metric;
                }
                out.metric_sum[series] = metric_sum;
                for (std::size_t i = 0; i < n_snr; ++i) {
                    for (std::size_t r = 0; r < n_rbs; ++r) {
                        gammas[r] = snr_lin[i] * gains[r];
                    }
                    const double p = tb_error_prob(effective_snr(gammas), cfg.mcs);
                    out.errors[series * n_snr + i] = u < p ? 1 : 0;
                }
            }
        }
        outcomes[t] = std::move(out);
    });

    SweepResult result;
    result.config_echo = to_config_text(cfg);
    for (std::size_t k = 0; k < n_series; ++k) {
        Series series;
        series.scheme = schemes[keys[k].scheme_index].spec.label();
        if (tag_sbs) {
            series.scheme += "@sbs" + std::to_string(sbs_list[keys[k].sbs_index]);
        }
        double metric_total = 0.0;
        series.trial_metric.reserve(outcomes.size());
        for (const auto& o : outcomes) {
            metric_total += o.metric_sum[k];
            series.trial_metric.push_back(o.metric_sum[k] / static_cast<double>(n_rbs));
        }
        series.mean_rb_metric = metric_total / static_cast<double>(outcomes.size() * n_rbs);
        for (std::size_t i = 0; i < n_snr; ++i) {
            std::int64_t errors = 0;
            for (const auto& o : outcomes) {
                errors += o.errors[k * n_snr + i];
            }
            series.points.push_back(make_bler_point(snr_db[i], cfg.n_tbs, errors));
        }
        result.series.push_back(std::move(series));
    }
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace

const Series* SweepResult::find(std::string_view scheme) const
{
    for (const auto& s : series) {
        if (s.scheme == scheme) {
            return &s;
        }
    }
    return nullptr;
}

SweepResult run_sweep(const SimConfig& cfg, int workers)
{
    const std::array<int, 1> sbs{cfg.sbs_rbs};
    return run_trials(cfg, sbs, false, workers);
}

SweepResult sbs_study(const SimConfig& cfg, std::span<const int> sbs_list, int workers)
{
    for (int s : sbs_list) {
        if (s < 1 || s > cfg.grid.n_rbs) {
            throw ConfigError("sbs_list: " + std::to_string(s) + " is outside 1.." + std::to_string(cfg.grid.n_rbs));
        }
    }
    return run_trials(cfg, sbs_list, true, workers);
}

double TpmiStats::agreement_at(int separation) const
{
    for (const auto& [d, rate] : agreement) {
        if (d == separation) {
            return rate;
        }
    }
    return std::nan("");
}

TpmiStats tpmi_stats(const ChannelGrid& grid, const SubbandPartition& part, const Codebook& cb)
{
    const RealizationStats rs = realization_stats(grid, part);
    const PrecoderPlan plan = plan_precoders(rs, PrecoderSource{&cb}, Mode::SB);

    TpmiStats st;
    st.n_subbands = part.size();
    st.bits_per_subband = static_cast<int>(std::bit_width(cb.size() - 1));
    st.total_bits = st.n_subbands * static_cast<std::size_t>(st.bits_per_subband);
    for (int d : kAgreementSeparations) {
        const auto sep = static_cast<std::size_t>(d);
        if (sep >= st.n_subbands) {
            continue;
        }
        std::size_t same = 0;
        for (std::size_t l = 0; l + sep < st.n_subbands; ++l) {
            same += plan.tpmi[l] == plan.tpmi[l + sep] ? 1 : 0;
        }
        st.agreement.emplace_back(d, static_cast<double>(same) / static_cast<double>(st.n_subbands - sep));
    }
    return st;
}

TpmiReport tpmi_report(const SimConfig& cfg, int workers)
{
    cfg.validate();
    const TdlChannel channel(cfg.grid, cfg.profile(), cfg.n_rx, cfg.n_tx);
    const SubbandPartition part = partition(cfg.grid, cfg.sbs_rbs);

    TpmiReport report;
    std::vector<Codebook> books;
    for (const auto& s : cfg.schemes) {
        if (s.mode != Mode::SB || s.kind == SchemeKind::Svd) {
            continue;
        }
        books.push_back(s.make_codebook(cfg.n_tx));
        TpmiReport::Entry e;
        e.scheme = s.label();
        e.codebook_size = books.back().size();
        e.per_realization.resize(static_cast<std::size_t>(cfg.n_tbs));
        report.entries.push_back(std::move(e));
    }

    parallel_for(static_cast<std::size_t>(cfg.n_tbs), workers, [&](std::size_t t) {
        const ChannelGrid grid = channel.realize(cfg.seed, t);
        for (std::size_t k = 0; k < books.size(); ++k) {
            report.entries[k].per_realization[t] = tpmi_stats(grid, part, books[k]);
        }
    });

    for (auto& e : report.entries) {
        e.mean = e.per_realization.front();
        for (auto& [d, rate] : e.mean.agreement) {
            double sum = 0.0;
            for (const auto& r : e.per_realization) {
                sum += r.agreement_at(d);
            }
            rate = sum / static_cast<double>(e.per_realization.size());
        }
    }
    return report;
}

std::string TpmiReport::to_text() const
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    for (const auto& e : entries) {
        os << "scheme " << e.scheme << " codebook_size " << e.codebook_size << " subbands " << e.mean.n_subbands
           << " bits_per_subband " << e.mean.bits_per_subband << " total_bits " << e.mean.total_bits << '\n';
        os << "  mean_agreement";
        for (const auto& [d, rate] : e.mean.agreement) {
            os << " sep" << d << '=' << rate;
        }
        os << '\n';
        for (std::size_t t = 0; t < e.per_realization.size(); ++t) {
            const auto& r = e.per_realization[t];
            os << "  realization " << t << " total_bits " << r.total_bits << " adjacent_agreement "
               << (r.agreement.empty() ? std::nan("") : r.agreement_at(1)) << '\n';
        }
    }
    return os.str();
}

std::optional<double> snr_at_bler(std::span<const BlerPoint> points, double target)
{
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const BlerPoint& a = points[i];
        const BlerPoint& b = points[i + 1];
        if (a.bler == target) {
            return a.snr_db;
        }
        if (a.bler > target && b.bler < target) {
            const double ya = std::log10(std::max(a.bler, 0.5 / static_cast<double>(a.trials)));
            const double yb = std::log10(std::max(b.bler, 0.5 / static_cast<double>(b.trials)));
            const double yt = std::log10(target);
            return a.snr_db + (yt - ya) / (yb - ya) * (b.snr_db - a.snr_db);
        }
    }
    if (!points.empty() && points.back().bler == target) {
        return points.back().snr_db;
    }
    return std::nullopt;
}

std::optional<double> gain_db(const Series& baseline, const Series& candidate, double target)
{
    const auto a = snr_at_bler(baseline.points, target);
    const auto b = snr_at_bler(candidate.points, target);
    if (!a || !b) {
        return std::nullopt;
    }
    return *a - *b;
}

} // namespace sbp
