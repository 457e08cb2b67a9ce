// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks 1-8. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include "sbprec/channel.hpp"
#include "sbprec/codebook.hpp"
#include "sbprec/config.hpp"
#include "sbprec/csv.hpp"
#include "sbprec/precoding.hpp"
#include "sbprec/rng.hpp"
#include "sbprec/sweep.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace sbp;

namespace {

constexpr double kTol = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

CVec random_unit(RngStream& rng, std::size_t n)
{
    CVec v(n);
    for (auto& x : v) {
        x = rng.complex_gaussian(1.0);
    }
    const double s = norm(v);
    for (auto& x : v) {
        x /= s;
    }
    return v;
}

CMat random_channel(RngStream& rng, std::size_t rows, std::size_t cols)
{
    CMat h(rows, cols);
    for (auto& x : h.data()) {
        x = rng.complex_gaussian(1.0);
    }
    return h;
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_text(const SweepResult& r)
{
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

SimConfig parse(const std::string& text)
{
    std::istringstream is(text);
    return parse_config(is);
}

std::vector<Codebook> configured_codebooks(int n_tx)
{
    std::vector<Codebook> out{legacy_codebook(n_tx)};
    if (n_tx == 2) {
        const std::array<int, 1> b{3};
        out.push_back(proposed_codebook(2, b));
    } else if (n_tx == 4) {
        const std::array<int, 3> b{3, 3, 3};
        out.push_back(proposed_codebook(4, b));
    } else {
        const std::array<int, 7> b{2, 2, 2, 2, 2, 2, 2};
        out.push_back(type1_8tx_codebook(2, 2));
        out.push_back(proposed_codebook(8, b));
    }
    return out;
}

// 1. SVD precoder dominates every codebook entry.
Outcome ac1()
{
    const auto t0 = Clock::now();
    Outcome o;
    std::size_t checked = 0;
    double worst = -1.0;
    for (int n_tx : {2, 4, 8}) {
        const auto books = configured_codebooks(n_tx);
        RngStream rng(101, StreamPurpose::TestData, static_cast<std::uint64_t>(n_tx));
        for (int i = 0; i < 1000; ++i) {
            const SubbandStats s = stats_from_cov(gram(random_channel(rng, 8, static_cast<std::size_t>(n_tx))));
            const SubbandAssignment svd = svd_assignment(s);
            if (svd.metric != 1.0) {
                o.pass = false;
            }
            const double gamma_svd = post_snr(1.0, s.sigma, svd.metric, 1.0);
            for (const Codebook& cb : books) {
                for (const auto& p : cb.entries()) {
                    const double m = std::abs(inner(s.v, p.weights));
                    const double rq = inner(p.weights, matvec(s.cov, p.weights)).real();
                    worst = std::max({worst, m - 1.0, (rq - gamma_svd) / gamma_svd});
                    ++checked;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.pass = o.pass && worst <= kTol && secs < 10.0;
    o.detail = std::to_string(checked) + " (cov, entry) pairs, worst excess " + fmt("%.2e", worst) + ", " +
               fmt("%.2f", secs) + " s";
    return o;
}

// 2. SB selection dominates WB per sub-band. 3. Superset dominates subset.
Outcome dominance(bool wb_vs_sb)
{
    const auto t0 = Clock::now();
    Outcome o;
    const GridSpec spec;
    const SubbandPartition part = partition(spec, 1);
    double worst = -1.0;
    std::size_t checked = 0;
    const std::array<int, 1> b3{3};
    const Codebook fine = proposed_codebook(2, b3);
    const Codebook legacy2 = legacy_codebook(2);
    if (!wb_vs_sb && !is_superset(fine, legacy2)) {
        return {false, "proposed(2,[3]) is not a superset of legacy 2TX"};
    }
    for (int n_tx : wb_vs_sb ? std::vector<int>{2, 4} : std::vector<int>{2}) {
        const TdlChannel ch(spec, default_profile(), 8, n_tx);
        const Codebook cb = legacy_codebook(n_tx);
        for (std::uint64_t t = 0; t < 200; ++t) {
            const RealizationStats rs = realization_stats(ch.realize(wb_vs_sb ? 202 : 303, t), part);
            if (wb_vs_sb) {
                const auto sb = assign_from_stats(rs, PrecoderSource{&cb}, Mode::SB, 1.0, 1.0);
                const auto wb = assign_from_stats(rs, PrecoderSource{&cb}, Mode::WB, 1.0, 1.0);
                for (std::size_t l = 0; l < sb.size(); ++l) {
                    worst = std::max({worst, wb[l].metric - sb[l].metric,
                                      wb[l].post_snr_linear - sb[l].post_snr_linear});
                    ++checked;
                }
            } else {
                const auto small = assign_from_stats(rs, PrecoderSource{&legacy2}, Mode::SB, 1.0, 1.0);
                const auto big = assign_from_stats(rs, PrecoderSource{&fine}, Mode::SB, 1.0, 1.0);
                for (std::size_t l = 0; l < big.size(); ++l) {
                    worst = std::max(worst, small[l].metric - big[l].metric);
                    ++checked;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.pass = worst <= kTol;
    o.detail = std::to_string(checked) + " sub-bands, worst violation " + fmt("%.2e", worst) + ", " +
               fmt("%.2f", secs) + " s";
    return o;
}

// 4. Codebook census.
Outcome ac4()
{
    const auto t0 = Clock::now();
    const std::array<int, 3> b333{3, 3, 3};
    const std::array<int, 7> b2x7{2, 2, 2, 2, 2, 2, 2};
    struct Row {
        Codebook cb;
        std::size_t expected;
    };
    const std::vector<Row> rows{{legacy_codebook(2), 4},
                                {legacy_codebook(4), 16},
                                {type1_8tx_codebook(4, 1), 16},
                                {proposed_codebook(4, b333), 512},
                                {proposed_codebook(8, b2x7), 16384}};
    Outcome o;
    double worst = 0.0;
    std::string sizes;
    for (const auto& r : rows) {
        sizes += (sizes.empty() ? "" : "/") + std::to_string(r.cb.size());
        if (r.cb.size() != r.expected) {
            o.pass = false;
        }
        const double mod = 1.0 / std::sqrt(static_cast<double>(r.cb.n_tx()));
        for (const auto& p : r.cb.entries()) {
            worst = std::max(worst, std::abs(norm(p.weights) - 1.0));
            for (const auto& x : p.weights) {
                worst = std::max(worst, std::abs(std::abs(x) - mod));
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.pass = o.pass && worst <= 1e-12 && secs < 5.0;
    o.detail = "sizes " + sizes + ", worst norm/modulus error " + fmt("%.1e", worst) + ", " + fmt("%.2f", secs) + " s";
    return o;
}

// 5. 2TX quantization bound and phase-sweep oracle.
Outcome ac5()
{
    const auto t0 = Clock::now();
    constexpr int kSweep = 10000;
    constexpr int kVectors = 10000;
    Outcome o;
    int bound_fail = 0;
    int oracle_fail = 0;
    std::vector<double> f(kSweep);
    for (int m : {2, 3, 4}) {
        const std::array<int, 1> bits{m};
        const Codebook cb = proposed_codebook(2, bits);
        const int n_grid = 1 << m;
        const int stride = kSweep / n_grid;
        RngStream rng(505, StreamPurpose::TestData, static_cast<std::uint64_t>(m));
        for (int i = 0; i < kVectors; ++i) {
            const CVec v = random_unit(rng, 2);
            const Selection sel = search_precoder(v, cb);
            const double a1 = std::abs(v[0]);
            const double a2 = std::abs(v[1]);
            const double bound = (a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * std::cos(std::numbers::pi / n_grid)) / 2.0;
            if (sel.metric_sq < bound - kTol) {
                ++bound_fail;
            }
            // evaluate |v^H w(phi)|^2 on a uniform sweep that contains every grid phase
            for (int k = 0; k < kSweep; ++k) {
                const cplx w2 = std::polar(1.0, 2.0 * std::numbers::pi * k / kSweep);
                const cplx s = std::conj(v[0]) + std::conj(v[1]) * w2;
                f[static_cast<std::size_t>(k)] = std::norm(s) / 2.0;
            }
            double best = -1.0;
            for (int g = 0; g < n_grid; ++g) {
                best = std::max(best, f[static_cast<std::size_t>(g * stride)]);
            }
            int best_g = -1;
            for (int g = 0; g < n_grid && best_g < 0; ++g) {
                if (f[static_cast<std::size_t>(g * stride)] >= best - kTieTolerance) {
                    best_g = g;
                }
            }
            const double sweep_max = *std::max_element(f.begin(), f.end());
            if (sel.tpmi != static_cast<std::size_t>(best_g) || std::abs(sel.metric_sq - best) > 1e-12 ||
                sweep_max < best) {
                ++oracle_fail;
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.pass = bound_fail == 0 && oracle_fail == 0 && secs < 30.0;
    o.detail = "M=2,3,4 x 10^4 vectors: " + std::to_string(bound_fail) + " bound violations, " +
               std::to_string(oracle_fail) + " oracle mismatches, " + fmt("%.2f", secs) + " s";
    return o;
}

double sigma_diff(const BlerPoint& a, const BlerPoint& b)
{
    const double va = a.bler * (1.0 - a.bler) / static_cast<double>(a.trials);
    const double vb = b.bler * (1.0 - b.bler) / static_cast<double>(b.trials);
    return std::sqrt(va + vb);
}

// 6. Directional reproduction of the BLER findings.
Outcome ac6()
{
    const auto t0 = Clock::now();
    struct Case {
        int n_tx;
        std::string proposed;
        double lo;
        double hi;
    };
    const std::vector<Case> cases{{2, "SB:proposed:3", 1.0, 10.0},
                                  {4, "SB:proposed:3:3:3", 0.0, 11.0},
                                  {8, "SB:proposed:2", -2.0, 12.0}};
    Outcome o;
    std::array<double, 3> legacy_gain{};
    double proposed_gain_8 = 0.0;
    int order_violations = 0;
    std::string notes;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const Case& k = cases[c];
        const SimConfig cfg = parse("n_tx = " + std::to_string(k.n_tx) + "\nn_rx = 8\nschemes = WB:legacy, SB:legacy, " +
                                    k.proposed + ", SB:svd\nsnr.start_db = " + fmt("%g", k.lo) +
                                    "\nsnr.stop_db = " + fmt("%g", k.hi) + "\nsnr.step_db = 0.5\nn_tbs = 1500\nseed = 6\n");
        const SweepResult r = run_sweep(cfg, 1);
        const Series* wb = r.find("WB:legacy");
        const Series* sb = r.find("SB:legacy");
        const Series* pr = r.find(parse_scheme(k.proposed, k.n_tx).label());
        const Series* sv = r.find("SB:svd");
        const auto g_leg = gain_db(*wb, *sb);
        const auto g_pro = gain_db(*wb, *pr);
        if (!g_leg || !g_pro) {
            return {false, std::to_string(k.n_tx) + "TX: a curve does not cross BLER 0.1 in the swept range"};
        }
        legacy_gain[c] = *g_leg;
        if (k.n_tx == 8) {
            proposed_gain_8 = *g_pro;
        }
        notes += " " + std::to_string(k.n_tx) + "TX SB-legacy " + fmt("%.2f", *g_leg) + " dB, SB-proposed " +
                 fmt("%.2f", *g_pro) + " dB;";
        const std::array<const Series*, 4> order{sv, pr, sb, wb};
        for (std::size_t i = 0; i < wb->points.size(); ++i) {
            for (std::size_t j = 0; j + 1 < order.size(); ++j) {
                const BlerPoint& better = order[j]->points[i];
                const BlerPoint& worse = order[j + 1]->points[i];
                if (better.bler > worse.bler + 3.0 * sigma_diff(better, worse)) {
                    ++order_violations;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool a = legacy_gain[0] > 0.0;
    const bool b = legacy_gain[1] > legacy_gain[0];
    const bool c = proposed_gain_8 > legacy_gain[2];
    const bool d = order_violations == 0;
    o.pass = a && b && c && d && secs < 600.0;
    o.detail = std::string("(a)") + (a ? "ok" : "no") + " (b)" + (b ? "ok" : "no") + " (c)" + (c ? "ok" : "no") +
               " (d)" + (d ? "ok" : "no") + "; gains over WB-legacy at BLER 0.1:" + notes + " " +
               std::to_string(order_violations) + " ordering violations; " + fmt("%.1f", secs) + " s";
    return o;
}

// 7. Sub-band size study.
Outcome ac7()
{
    const auto t0 = Clock::now();
    const SimConfig cfg = parse("n_tx = 2\nn_rx = 8\nschemes = SB:legacy\nsnr.start_db = 4\nsnr.stop_db = 4\n"
                                "n_tbs = 1500\nseed = 7\n");
    const std::array<int, 7> sbs{1, 2, 5, 10, 30, 90, 270};
    const SweepResult r = sbs_study(cfg, sbs, 1);
    std::vector<const Series*> s;
    for (int b : sbs) {
        s.push_back(r.find("SB:legacy@sbs" + std::to_string(b)));
    }

    // non-increasing up to 3 standard errors of the paired per-trial difference
    bool monotone = true;
    std::string metrics;
    for (std::size_t i = 0; i < s.size(); ++i) {
        metrics += (i ? " " : "") + fmt("%.5f", s[i]->mean_rb_metric);
        if (i == 0) {
            continue;
        }
        const auto& a = s[i - 1]->trial_metric;
        const auto& b = s[i]->trial_metric;
        const double n = static_cast<double>(a.size());
        double mean = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) {
            mean += b[t] - a[t];
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) {
            var += (b[t] - a[t] - mean) * (b[t] - a[t] - mean);
        }
        const double se = std::sqrt(var / (n - 1.0) / n);
        if (mean > 3.0 * se) {
            monotone = false;
        }
    }
    const double gap10 = s[0]->mean_rb_metric - s[3]->mean_rb_metric;
    const double gap270 = s[0]->mean_rb_metric - s[6]->mean_rb_metric;
    const double ratio = gap10 / gap270;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    Outcome o;
    o.pass = monotone && ratio < 0.2 && secs < 120.0;
    o.detail = "mean metric for SBS 1,2,5,10,30,90,270: " + metrics + "; non-increasing " +
               (monotone ? "yes" : "no") + "; gap(1->10)/gap(1->270) = " + fmt("%.3f", ratio) +
               " (needs < 0.2); " + fmt("%.1f", secs) + " s";
    return o;
}

// 8. Byte-identical CSV across runs and worker counts.
Outcome ac8()
{
    const auto t0 = Clock::now();
    const std::string text = "n_tx = 4\nn_rx = 8\ngrid.n_rbs = 50\nschemes = WB:legacy, SB:legacy, SB:proposed:3, SB:svd\n"
                             "snr.start_db = 0\nsnr.stop_db = 8\nsnr.step_db = 0.5\nn_tbs = 200\nseed = 8\n";
    const SimConfig cfg = parse(text);
    const std::string a = csv_text(run_sweep(cfg, 1));
    const std::string b = csv_text(run_sweep(cfg, 1));
    const std::string c = csv_text(run_sweep(cfg, 8));
    bool ok = a == b && a == c;
    std::string detail = "in-process runs identical: " + std::string(ok ? "yes" : "no");

#ifdef SBPREC_CLI_PATH
    const auto dir = std::filesystem::temp_directory_path() / "sbprec_acceptance";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "ac8.cfg") << text;
    }
    const std::string cli = SBPREC_CLI_PATH;
    auto run = [&](const std::string& out, int workers) {
        const std::string cmd = "\"" + cli + "\" run --config \"" + (dir / "ac8.cfg").string() + "\" --out \"" +
                                (dir / out).string() + "\" --workers " + std::to_string(workers) + " > /dev/null";
        return std::system(cmd.c_str()) == 0;
    };
    const bool ran = run("r1.csv", 1) && run("r2.csv", 1) && run("r8.csv", 8);
    const std::string f1 = read_file(dir / "r1.csv");
    const bool cli_ok = ran && !f1.empty() && f1 == read_file(dir / "r2.csv") && f1 == read_file(dir / "r8.csv") &&
                        f1 == a;
    ok = ok && cli_ok;
    detail += ", CLI --workers 1/1/8 files identical: " + std::string(cli_ok ? "yes" : "no");
    std::filesystem::remove_all(dir);
#endif
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return {ok, detail + "; " + fmt("%.1f", secs) + " s"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 SVD dominance", ac1},
        {"AC2 SB over WB dominance", [] { return dominance(true); }},
        {"AC3 superset dominance", [] { return dominance(false); }},
        {"AC4 codebook census", ac4},
        {"AC5 2TX quantization bound", ac5},
        {"AC6 BLER trends", ac6},
        {"AC7 sub-band size study", ac7},
        {"AC8 reproducibility", ac8},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
