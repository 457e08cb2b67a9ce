// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: BLER sweeps, sub-band size studies, TPMI signalling
// reports and codebook export.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include "sbprec/codebook.hpp"
#include "sbprec/config.hpp"
#include "sbprec/csv.hpp"
#include "sbprec/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    int workers = 1;
};

sbp::SimConfig load(const CommonOpts& o)
{
    sbp::SimConfig cfg = sbp::load_config(o.config_path);
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

void emit(const sbp::SweepResult& result, const std::string& out)
{
    if (out.empty()) {
        sbp::write_csv(std::cout, result);
        return;
    }
    sbp::emit_csv(result, out);
    sbp::emit_metadata(result, out + ".meta.json");
}

void add_common(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--config", o.config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "override the configured seed");
    cmd->add_option("--out", o.out, "output file (stdout when omitted)");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 256));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sub-band uplink precoding link-level simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("sbprec ") + sbp::kVersion);

    CommonOpts run_opts;
    auto* run = app.add_subcommand("run", "BLER sweep over SNR for every configured scheme");
    add_common(run, run_opts);

    CommonOpts sbs_opts;
    auto* sbs = app.add_subcommand("sbs", "BLER per sub-band size (uses sbs_list from the config)");
    add_common(sbs, sbs_opts);

    CommonOpts tpmi_opts;
    auto* tpmi = app.add_subcommand("tpmi", "TPMI signalling load and sub-band agreement report");
    add_common(tpmi, tpmi_opts);

    int export_ntx = 2;
    std::string export_cb = "legacy";
    std::string export_out;
    auto* exp = app.add_subcommand("export-codebook", "write one codebook in text form");
    exp->add_option("--n-tx", export_ntx, "antenna ports")->check(CLI::IsMember({2, 4, 8}));
    exp->add_option("--codebook", export_cb, "legacy | proposed:M2[:M3...] | type1:N1:N2");
    exp->add_option("--out", export_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            const auto cfg = load(run_opts);
            emit(sbp::run_sweep(cfg, run_opts.workers), run_opts.out);
        } else if (*sbs) {
            const auto cfg = load(sbs_opts);
            const auto result = sbp::sbs_study(cfg, cfg.sbs_list, sbs_opts.workers);
            emit(result, sbs_opts.out);
            if (!sbs_opts.out.empty()) {
                for (const auto& s : result.series) {
                    std::cout << s.scheme << " mean_rb_metric " << s.mean_rb_metric << '\n';
                }
            }
        } else if (*tpmi) {
            const auto cfg = load(tpmi_opts);
            write_text(tpmi_opts.out, sbp::tpmi_report(cfg, tpmi_opts.workers).to_text());
        } else if (*exp) {
            const auto spec = sbp::parse_scheme("SB:" + export_cb, export_ntx);
            if (spec.kind == sbp::SchemeKind::Svd) {
                throw sbp::ConfigError("--codebook: svd is not a codebook");
            }
            std::ostringstream os;
            sbp::write_codebook(os, spec.make_codebook(export_ntx));
            write_text(export_out, os.str());
        }
    } catch (const sbp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
