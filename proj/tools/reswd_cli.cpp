// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

// Command-line front end; talks to the library only through the C API.

#include "reswd/reswd.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Failure {
    int code;
};

int exit_code(reswd_status s) {
    switch (s) {
    case RESWD_ERR_INVALID_ARGUMENT:
    case RESWD_ERR_CONFIG:
    case RESWD_ERR_INPUT:
        return kExitUsage;
    default:
        return kExitRuntime;
    }
}

void check(reswd_status s) {
    if (s == RESWD_OK)
        return;
    std::fprintf(stderr, "error: %s\n", reswd_last_error());
    throw Failure{exit_code(s)};
}

[[noreturn]] void die(int code, const std::string &msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    throw Failure{code};
}

template <class T, void (*Destroy)(T *)> struct Deleter {
    void operator()(T *p) const { Destroy(p); }
};
using Samples = std::unique_ptr<reswd_samples, Deleter<reswd_samples, reswd_samples_destroy>>;
using Report = std::unique_ptr<reswd_report, Deleter<reswd_report, reswd_report_destroy>>;
using Bench = std::unique_ptr<reswd_bench, Deleter<reswd_bench, reswd_bench_destroy>>;
using Image = std::unique_ptr<reswd_image, Deleter<reswd_image, reswd_image_destroy>>;

void add_estimator_flags(CLI::App *cmd, reswd_config &cfg) {
    cmd->add_option("--projections", cfg.total_projections, "Projection budget L")
        ->capture_default_str();
    cmd->add_option("--fresh", cfg.fresh_count, "Fresh directions per step M")
        ->capture_default_str();
    cmd->add_option("--p", cfg.p, "Cost exponent")->capture_default_str();
    cmd->add_option("--alpha", cfg.alpha, "ESS flush threshold")->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "Reservoir decay time constant (0 = off)")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Seed")->capture_default_str();
}

void add_optimizer_flags(CLI::App *cmd, reswd_optimizer &opt) {
    cmd->add_option("--lr", opt.lr, "Learning rate")->capture_default_str();
    cmd->add_option("--optimizer", opt.kind, "adam or sgd")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, reswd_optimizer_kind>{{"adam", RESWD_OPT_ADAM},
                                                        {"sgd", RESWD_OPT_SGD}},
            CLI::ignore_case))
        ->default_str("adam");
}

std::filesystem::path prepare_dir(const std::string &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        die(kExitRuntime, "cannot create output directory '" + dir + "'");
    return dir;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void run_bench(const reswd_bench_config &cfg, const std::string &out, bool timing) {
    const auto dir = prepare_dir(out);
    reswd_bench *raw = nullptr;
    check(reswd_bench_run(&cfg, &raw));
    Bench bench(raw);
    check(reswd_bench_write(bench.get(), dir.c_str(), timing ? 1 : 0));
    for (size_t i = 0; i < reswd_bench_warning_count(bench.get()); ++i)
        std::fprintf(stderr, "warning: %s\n", reswd_bench_warning(bench.get(), i));
    std::printf("%s\n", reswd_bench_summary_json(bench.get(), timing ? 1 : 0));
}

void run_match(const std::string &source, const std::string &target, const reswd_config &cfg,
               const reswd_optimizer &opt, int steps, reswd_method method, const std::string &out,
               bool timing) {
    reswd_samples *raw = nullptr;
    check(reswd_samples_load(source.c_str(), &raw));
    Samples x(raw);
    check(reswd_samples_load(target.c_str(), &raw));
    Samples y(raw);
    if (reswd_samples_dim(x.get()) != reswd_samples_dim(y.get()))
        die(kExitUsage, "source has dimension " + std::to_string(reswd_samples_dim(x.get())) +
                            " but target has dimension " +
                            std::to_string(reswd_samples_dim(y.get())));
    const auto dir = prepare_dir(out);
    reswd_report *rep = nullptr;
    check(reswd_match(x.get(), y.get(), &cfg, steps, &opt, method, &rep));
    Report report(rep);
    check(reswd_report_write_csv(report.get(), (dir / "trajectory.csv").c_str(), timing ? 1 : 0));
    check(reswd_samples_save(reswd_report_final_samples(report.get()),
                             (dir / "final_points.txt").c_str()));
    for (size_t i = 0; i < reswd_report_warning_count(report.get()); ++i)
        std::fprintf(stderr, "warning: %s\n", reswd_report_warning(report.get(), i));
    reswd_step_record first{};
    check(reswd_report_step(report.get(), 0, &first));
    std::printf("mean_w1 initial %s final %s\n", fmt_double(first.mean_w1).c_str(),
                fmt_double(reswd_report_final_mean_w1(report.get())).c_str());
}

void run_color(const std::string &source, const std::string &reference, const reswd_config &cfg,
               int steps, const std::string &out, const std::string &preview, int depth) {
    reswd_image *raw = nullptr;
    check(reswd_image_load_png(source.c_str(), &raw));
    Image src(raw);
    check(reswd_image_load_png(reference.c_str(), &raw));
    Image ref(raw);
    reswd_cdl cdl;
    reswd_report *rep = nullptr;
    check(reswd_color_match(src.get(), ref.get(), &cfg, steps, &cdl, &rep));
    Report report(rep);
    for (size_t i = 0; i < reswd_report_warning_count(report.get()); ++i)
        std::fprintf(stderr, "warning: %s\n", reswd_report_warning(report.get(), i));
    check(reswd_cdl_write_xml(&cdl, out.c_str()));
    if (!preview.empty()) {
        check(reswd_cdl_apply(src.get(), &cdl, &raw));
        Image graded(raw);
        check(reswd_image_save_png(graded.get(), preview.c_str(), depth));
    }
    std::printf("slope %s %s %s offset %s %s %s power %s %s %s saturation %s\n",
                fmt_double(cdl.slope[0]).c_str(), fmt_double(cdl.slope[1]).c_str(),
                fmt_double(cdl.slope[2]).c_str(), fmt_double(cdl.offset[0]).c_str(),
                fmt_double(cdl.offset[1]).c_str(), fmt_double(cdl.offset[2]).c_str(),
                fmt_double(cdl.power[0]).c_str(), fmt_double(cdl.power[1]).c_str(),
                fmt_double(cdl.power[2]).c_str(), fmt_double(cdl.saturation).c_str());
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sliced Wasserstein distribution matching with a reservoir of projections"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // bench
    reswd_bench_config bcfg;
    reswd_bench_config_default(&bcfg);
    std::string bench_out = "bench_out";
    std::vector<int> ablation;
    bool bench_no_timing = false;
    auto *bench = app.add_subcommand("bench", "Synthetic distribution-matching benchmark");
    bench->add_option("--pairs", bcfg.pairs, "Distribution pairs")->capture_default_str();
    bench->add_option("--samples", bcfg.samples, "Samples per distribution")->capture_default_str();
    bench->add_option("--dim", bcfg.dim, "Dimension")->capture_default_str();
    bench->add_option("--steps", bcfg.steps, "Optimisation steps")->capture_default_str();
    bench->add_option("--seeds-per-pair", bcfg.seeds_per_pair, "Estimator seeds per pair")
        ->capture_default_str();
    add_estimator_flags(bench, bcfg.estimator);
    add_optimizer_flags(bench, bcfg.optimizer);
    bench->add_option("--ablation", ablation, "Extra ReSWD runs with these fresh counts")
        ->delimiter(',');
    bench->add_option("--jobs", bcfg.jobs, "Worker threads (0 = logical cores)")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
    bench->add_flag("--no-timing", bench_no_timing, "Write wall_ms_mean as 0 (byte-stable CSVs)");

    // match
    reswd_config mcfg;
    reswd_config_default(&mcfg);
    reswd_optimizer mopt;
    reswd_optimizer_default(&mopt);
    std::string msource, mtarget, mout = "match_out";
    int msteps = 300;
    reswd_method mmethod = RESWD_METHOD_RESWD;
    bool match_no_timing = false;
    auto *match = app.add_subcommand("match", "Move source points toward target points");
    match->add_option("--source", msource, "Source point file")->required();
    match->add_option("--target", mtarget, "Target point file")->required();
    match->add_option("--steps", msteps, "Optimisation steps")->capture_default_str();
    match->add_option("--method", mmethod, "reswd or swd")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, reswd_method>{{"reswd", RESWD_METHOD_RESWD},
                                                {"swd", RESWD_METHOD_SWD}},
            CLI::ignore_case))
        ->default_str("reswd");
    add_estimator_flags(match, mcfg);
    add_optimizer_flags(match, mopt);
    match->add_option("--out", mout, "Output directory")->capture_default_str();
    match->add_flag("--no-timing", match_no_timing, "Write wall_ms as 0");

    // color-match
    reswd_config ccfg;
    reswd_config_default(&ccfg);
    std::string csource, creference, cout_path, cpreview;
    int csteps = 150, cdepth = 8;
    auto *color = app.add_subcommand("color-match", "Fit a CDL grade from source to reference");
    color->add_option("--source", csource, "Source PNG")->required();
    color->add_option("--reference", creference, "Reference PNG")->required();
    color->add_option("--steps", csteps, "Optimisation steps")->capture_default_str();
    color->add_option("--out", cout_path, "CDL XML output path")->required();
    color->add_option("--preview", cpreview, "Graded full-resolution PNG output path");
    color->add_option("--preview-depth", cdepth, "Preview bits per channel")
        ->check(CLI::IsMember({8, 16}))
        ->capture_default_str();
    add_estimator_flags(color, ccfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*bench) {
            bcfg.ablation_fresh = ablation.data();
            bcfg.ablation_count = ablation.size();
            run_bench(bcfg, bench_out, !bench_no_timing);
        } else if (*match) {
            run_match(msource, mtarget, mcfg, mopt, msteps, mmethod, mout, !match_no_timing);
        } else if (*color) {
            run_color(csource, creference, ccfg, csteps, cout_path, cpreview, cdepth);
        }
    } catch (const Failure &f) {
        return f.code;
    }
    return 0;
}
