// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "reswd/reswd.h"

#include "bench.hpp"
#include "color.hpp"
#include "error.hpp"
#include "points.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <thread>

struct reswd_samples {
    reswd::SampleSet set;
};

struct reswd_estimator {
    reswd::ReswdEstimator est;
};

struct reswd_report {
    reswd::MatchReport report;
    bool has_samples = false;
    reswd_samples samples;
};

struct reswd_bench {
    reswd::BenchReport report;
    std::string json;
    std::string json_untimed;
};

struct reswd_image {
    reswd::RgbImage img;
};

namespace {

thread_local std::string g_last_error;

reswd_status status_of(reswd::ErrorKind kind) {
    switch (kind) {
    case reswd::ErrorKind::InvalidArgument:
        return RESWD_ERR_INVALID_ARGUMENT;
    case reswd::ErrorKind::Config:
        return RESWD_ERR_CONFIG;
    case reswd::ErrorKind::Input:
        return RESWD_ERR_INPUT;
    case reswd::ErrorKind::Output:
        return RESWD_ERR_OUTPUT;
    case reswd::ErrorKind::Numeric:
        return RESWD_ERR_NUMERIC;
    }
    return RESWD_ERR_INTERNAL;
}

reswd_status set_error(reswd_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

template <class F> reswd_status guarded(F &&f) {
    try {
        f();
        return RESWD_OK;
    } catch (const reswd::Error &e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(RESWD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return set_error(RESWD_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(RESWD_ERR_INTERNAL, "unknown error");
    }
}

void need(const void *p, const char *what) {
    if (!p)
        reswd::fail(reswd::ErrorKind::InvalidArgument, fmt::format("{} must not be NULL", what));
}

reswd::ReswdConfig to_core(const reswd_config &c) {
    reswd::ReswdConfig r;
    r.total_projections = c.total_projections;
    r.fresh_count = c.fresh_count;
    r.p = c.p;
    r.alpha = c.alpha;
    r.tau = c.tau;
    r.seed = c.seed;
    return r;
}

reswd::OptimizerSpec to_core(const reswd_optimizer &o) {
    reswd::OptimizerSpec r;
    if (o.kind != RESWD_OPT_ADAM && o.kind != RESWD_OPT_SGD)
        reswd::fail(reswd::ErrorKind::InvalidArgument, "unknown optimizer kind");
    r.kind = o.kind == RESWD_OPT_SGD ? reswd::OptimizerSpec::Kind::Sgd
                                     : reswd::OptimizerSpec::Kind::Adam;
    r.lr = o.lr;
    r.beta1 = o.beta1;
    r.beta2 = o.beta2;
    r.eps = o.eps;
    if (!(r.lr > 0.0) || !std::isfinite(r.lr))
        reswd::fail(reswd::ErrorKind::Config, "lr must be positive");
    return r;
}

reswd::Method to_core(reswd_method m) {
    if (m == RESWD_METHOD_SWD)
        return reswd::Method::Swd;
    if (m == RESWD_METHOD_RESWD)
        return reswd::Method::Reswd;
    reswd::fail(reswd::ErrorKind::InvalidArgument, "unknown method");
}

reswd::CdlParams to_core(const reswd_cdl &c) {
    reswd::CdlParams r;
    for (int k = 0; k < 3; ++k) {
        r.slope[k] = c.slope[k];
        r.offset[k] = c.offset[k];
        r.power[k] = c.power[k];
    }
    r.saturation = c.saturation;
    r.validate();
    return r;
}

reswd_cdl from_core(const reswd::CdlParams &c) {
    reswd_cdl r;
    for (int k = 0; k < 3; ++k) {
        r.slope[k] = c.slope[k];
        r.offset[k] = c.offset[k];
        r.power[k] = c.power[k];
    }
    r.saturation = c.saturation;
    return r;
}

void copy_grad(const reswd::SampleSet &g, double *out) {
    if (out)
        std::copy(g.values().begin(), g.values().end(), out);
}

}  // namespace

extern "C" {

const char *reswd_last_error(void) { return g_last_error.c_str(); }

const char *reswd_status_name(reswd_status status) {
    switch (status) {
    case RESWD_OK:
        return "ok";
    case RESWD_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case RESWD_ERR_CONFIG:
        return "configuration error";
    case RESWD_ERR_INPUT:
        return "input error";
    case RESWD_ERR_OUTPUT:
        return "output error";
    case RESWD_ERR_NUMERIC:
        return "numeric error";
    case RESWD_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char *reswd_version(void) { return "0.1.0"; }

void reswd_config_default(reswd_config *cfg) {
    if (!cfg)
        return;
    const reswd::ReswdConfig d;
    *cfg = {d.total_projections, d.fresh_count, d.p, d.alpha, d.tau, d.seed};
}

reswd_status reswd_config_validate(const reswd_config *cfg) {
    return guarded([&] {
        need(cfg, "cfg");
        to_core(*cfg).validate();
    });
}

void reswd_optimizer_default(reswd_optimizer *opt) {
    if (!opt)
        return;
    const reswd::OptimizerSpec d;
    *opt = {RESWD_OPT_ADAM, d.lr, d.beta1, d.beta2, d.eps};
}

reswd_status reswd_samples_create(size_t n, size_t dim, const double *data, reswd_samples **out) {
    return guarded([&] {
        need(out, "out");
        need(data, "data");
        reswd::require(n >= 1 && dim >= 1, "samples: n and dim must be >= 1");
        auto s = std::make_unique<reswd_samples>();
        s->set = reswd::SampleSet(n, dim, std::vector<double>(data, data + n * dim));
        *out = s.release();
    });
}

reswd_status reswd_samples_load(const char *path, reswd_samples **out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto s = std::make_unique<reswd_samples>();
        s->set = reswd::read_points_file(path);
        *out = s.release();
    });
}

reswd_status reswd_samples_save(const reswd_samples *s, const char *path) {
    return guarded([&] {
        need(s, "samples");
        need(path, "path");
        reswd::write_points_file(path, s->set);
    });
}

void reswd_samples_destroy(reswd_samples *s) { delete s; }
size_t reswd_samples_count(const reswd_samples *s) { return s ? s->set.n_points() : 0; }
size_t reswd_samples_dim(const reswd_samples *s) { return s ? s->set.dim() : 0; }
const double *reswd_samples_data(const reswd_samples *s) {
    return s ? s->set.values().data() : nullptr;
}

reswd_status reswd_marginal_w1(const reswd_samples *x, const reswd_samples *y, double *out) {
    return guarded([&] {
        need(x, "x");
        need(y, "y");
        need(out, "out");
        *out = reswd::true_marginal_w1(x->set, y->set);
    });
}

reswd_status reswd_swd(const reswd_samples *x, const reswd_samples *y, int projections, double p,
                       uint64_t seed, double *value, double *grad) {
    return guarded([&] {
        need(x, "x");
        need(y, "y");
        need(value, "value");
        reswd::Rng rng(seed);
        const auto r = reswd::swd_estimate(x->set, y->set, projections, p, rng);
        *value = r.value;
        copy_grad(r.grad, grad);
    });
}

reswd_status reswd_estimator_create(const reswd_config *cfg, reswd_estimator **out) {
    return guarded([&] {
        need(cfg, "cfg");
        need(out, "out");
        *out = new reswd_estimator{reswd::ReswdEstimator(to_core(*cfg))};
    });
}

void reswd_estimator_destroy(reswd_estimator *est) { delete est; }

reswd_status reswd_estimator_step(reswd_estimator *est, const reswd_samples *x,
                                  const reswd_samples *y, reswd_step_result *result, double *grad) {
    return guarded([&] {
        need(est, "estimator");
        need(x, "x");
        need(y, "y");
        const auto r = est->est.step(x->set, y->set);
        if (result)
            *result = {r.value, r.ess, r.flushed ? 1 : 0, r.degenerate ? 1 : 0,
                       est->est.reservoir().size()};
        copy_grad(r.grad, grad);
    });
}

int64_t reswd_estimator_steps_taken(const reswd_estimator *est) {
    return est ? est->est.steps_taken() : 0;
}

reswd_status reswd_estimator_save_reservoir(const reswd_estimator *est, const char *path) {
    return guarded([&] {
        need(est, "estimator");
        need(path, "path");
        std::ofstream out(path);
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
        reswd::write_snapshot(out, est->est.reservoir());
        out.flush();
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
    });
}

reswd_status reswd_estimator_load_reservoir(reswd_estimator *est, const char *path) {
    return guarded([&] {
        need(est, "estimator");
        need(path, "path");
        std::ifstream in(path);
        if (!in)
            reswd::fail(reswd::ErrorKind::Input, fmt::format("cannot open '{}'", path));
        est->est.set_reservoir(reswd::read_snapshot(in));
    });
}

void reswd_report_destroy(reswd_report *r) { delete r; }
size_t reswd_report_step_count(const reswd_report *r) { return r ? r->report.steps.size() : 0; }

reswd_status reswd_report_step(const reswd_report *r, size_t i, reswd_step_record *out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        reswd::require(i < r->report.steps.size(), "report step index out of range");
        const auto &s = r->report.steps[i];
        *out = {s.step, s.loss, s.mean_w1, s.wall_ms};
    });
}

double reswd_report_final_mean_w1(const reswd_report *r) {
    return r ? r->report.final_mean_w1 : std::numeric_limits<double>::quiet_NaN();
}

const reswd_samples *reswd_report_final_samples(const reswd_report *r) {
    return r && r->has_samples ? &r->samples : nullptr;
}

size_t reswd_report_warning_count(const reswd_report *r) {
    return r ? r->report.warnings.size() : 0;
}

const char *reswd_report_warning(const reswd_report *r, size_t i) {
    return r && i < r->report.warnings.size() ? r->report.warnings[i].c_str() : nullptr;
}

reswd_status reswd_report_write_csv(const reswd_report *r, const char *path, int timing) {
    return guarded([&] {
        need(r, "report");
        need(path, "path");
        std::ofstream out(path);
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
        reswd::write_report_csv(out, r->report, timing != 0);
        out.flush();
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
    });
}

reswd_status reswd_match(const reswd_samples *x0, const reswd_samples *y, const reswd_config *cfg,
                         int steps, const reswd_optimizer *opt, reswd_method method,
                         reswd_report **out) {
    return guarded([&] {
        need(x0, "x0");
        need(y, "y");
        need(cfg, "cfg");
        need(opt, "optimizer");
        need(out, "out");
        auto r = std::make_unique<reswd_report>();
        r->report = reswd::match_particles(x0->set, y->set, to_core(*cfg), steps, to_core(*opt),
                                           to_core(method));
        r->samples.set = r->report.final_samples;
        r->has_samples = true;
        *out = r.release();
    });
}

void reswd_bench_config_default(reswd_bench_config *cfg) {
    if (!cfg)
        return;
    const reswd::BenchConfig d;
    cfg->pairs = d.n_pairs;
    cfg->samples = d.n_samples;
    cfg->dim = d.dim;
    cfg->steps = d.steps;
    cfg->seeds_per_pair = d.seeds_per_pair;
    reswd_config_default(&cfg->estimator);
    reswd_optimizer_default(&cfg->optimizer);
    cfg->seed = d.seed;
    cfg->jobs = 0;
    cfg->ablation_fresh = nullptr;
    cfg->ablation_count = 0;
}

reswd_status reswd_bench_run(const reswd_bench_config *cfg, reswd_bench **out) {
    return guarded([&] {
        need(cfg, "cfg");
        need(out, "out");
        reswd::BenchConfig bc;
        bc.n_pairs = cfg->pairs;
        bc.n_samples = cfg->samples;
        bc.dim = cfg->dim;
        bc.steps = cfg->steps;
        bc.seeds_per_pair = cfg->seeds_per_pair;
        bc.estimator = to_core(cfg->estimator);
        bc.optimizer = to_core(cfg->optimizer);
        bc.seed = cfg->seed;
        bc.jobs = cfg->jobs > 0
                      ? cfg->jobs
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        bc.methods = {{"swd", reswd::Method::Swd, 0},
                      {"reswd", reswd::Method::Reswd, cfg->estimator.fresh_count}};
        if (cfg->ablation_count > 0)
            need(cfg->ablation_fresh, "ablation_fresh");
        for (size_t i = 0; i < cfg->ablation_count; ++i) {
            const int m = cfg->ablation_fresh[i];
            bc.methods.push_back({fmt::format("reswd_m{}", m), reswd::Method::Reswd, m});
        }
        auto b = std::make_unique<reswd_bench>();
        b->report = reswd::run_benchmark(bc);
        b->report.runs.clear();
        b->report.runs.shrink_to_fit();
        b->json = reswd::summary_json(b->report);
        b->json_untimed = reswd::summary_json(b->report, false);
        *out = b.release();
    });
}

void reswd_bench_destroy(reswd_bench *b) { delete b; }
size_t reswd_bench_method_count(const reswd_bench *b) { return b ? b->report.methods.size() : 0; }

const char *reswd_bench_method_name(const reswd_bench *b, size_t method) {
    return b && method < b->report.methods.size() ? b->report.methods[method].name.c_str()
                                                  : nullptr;
}

reswd_status reswd_bench_method_summary(const reswd_bench *b, size_t method, double *final_mean_w1,
                                        double *ms_per_step, size_t *runs) {
    return guarded([&] {
        need(b, "bench");
        reswd::require(method < b->report.methods.size(), "method index out of range");
        const auto &m = b->report.methods[method];
        if (final_mean_w1)
            *final_mean_w1 = m.final_mean_w1;
        if (ms_per_step)
            *ms_per_step = m.ms_per_step;
        if (runs)
            *runs = m.runs;
    });
}

reswd_status reswd_bench_series(const reswd_bench *b, size_t method, size_t step, double *mean_w1,
                                double *pearson, double *wall_ms) {
    return guarded([&] {
        need(b, "bench");
        reswd::require(method < b->report.methods.size(), "method index out of range");
        const auto &m = b->report.methods[method];
        reswd::require(step < m.mean_w1.size(), "step index out of range");
        if (mean_w1)
            *mean_w1 = m.mean_w1[step];
        if (pearson)
            *pearson = m.pearson_corr.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : m.pearson_corr[step];
        if (wall_ms)
            *wall_ms = m.wall_ms_mean[step];
    });
}

size_t reswd_bench_warning_count(const reswd_bench *b) { return b ? b->report.warnings.size() : 0; }

const char *reswd_bench_warning(const reswd_bench *b, size_t i) {
    return b && i < b->report.warnings.size() ? b->report.warnings[i].c_str() : nullptr;
}

const char *reswd_bench_summary_json(const reswd_bench *b, int timing) {
    if (!b)
        return nullptr;
    return timing ? b->json.c_str() : b->json_untimed.c_str();
}

reswd_status reswd_bench_write(const reswd_bench *b, const char *dir, int timing) {
    return guarded([&] {
        need(b, "bench");
        need(dir, "dir");
        const std::filesystem::path root(dir);
        auto open = [](const std::filesystem::path &p) {
            std::ofstream f(p, std::ios::binary);
            if (!f)
                reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", p.string()));
            return f;
        };
        auto close = [](std::ofstream &f, const std::filesystem::path &p) {
            f.flush();
            if (!f)
                reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", p.string()));
        };
        for (const auto &m : b->report.methods) {
            const auto p = root / (m.name + ".csv");
            auto f = open(p);
            reswd::write_series_csv(f, m, timing != 0);
            close(f, p);
        }
        const auto p = root / "summary.json";
        auto f = open(p);
        f << (timing ? b->json : b->json_untimed) << '\n';
        close(f, p);
    });
}

reswd_status reswd_image_create(int width, int height, const double *rgb, reswd_image **out) {
    return guarded([&] {
        need(rgb, "rgb");
        need(out, "out");
        auto img = std::make_unique<reswd_image>();
        img->img = reswd::RgbImage(width, height);
        std::copy(rgb, rgb + img->img.pixels.size(), img->img.pixels.begin());
        for (double v : img->img.pixels)
            reswd::require(std::isfinite(v), "image values must be finite");
        *out = img.release();
    });
}

reswd_status reswd_image_load_png(const char *path, reswd_image **out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto img = std::make_unique<reswd_image>();
        img->img = reswd::read_png(path);
        *out = img.release();
    });
}

reswd_status reswd_image_save_png(const reswd_image *img, const char *path, int bit_depth) {
    return guarded([&] {
        need(img, "image");
        need(path, "path");
        reswd::write_png(path, img->img, bit_depth);
    });
}

void reswd_image_destroy(reswd_image *img) { delete img; }
int reswd_image_width(const reswd_image *img) { return img ? img->img.width : 0; }
int reswd_image_height(const reswd_image *img) { return img ? img->img.height : 0; }
const double *reswd_image_data(const reswd_image *img) {
    return img ? img->img.pixels.data() : nullptr;
}

reswd_status reswd_image_psnr(const reswd_image *a, const reswd_image *b, double *out) {
    return guarded([&] {
        need(a, "a");
        need(b, "b");
        need(out, "out");
        *out = reswd::psnr(a->img, b->img);
    });
}

void reswd_cdl_identity(reswd_cdl *cdl) {
    if (cdl)
        *cdl = from_core(reswd::CdlParams::identity());
}

reswd_status reswd_cdl_apply(const reswd_image *img, const reswd_cdl *cdl, reswd_image **out) {
    return guarded([&] {
        need(img, "image");
        need(cdl, "cdl");
        need(out, "out");
        auto r = std::make_unique<reswd_image>();
        r->img = reswd::apply_cdl(img->img, to_core(*cdl));
        *out = r.release();
    });
}

reswd_status reswd_cdl_write_xml(const reswd_cdl *cdl, const char *path) {
    return guarded([&] {
        need(cdl, "cdl");
        need(path, "path");
        const std::string text = reswd::cdl_xml_write(to_core(*cdl));
        std::ofstream out(path, std::ios::binary);
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
        out << text;
        out.flush();
        if (!out)
            reswd::fail(reswd::ErrorKind::Output, fmt::format("cannot write '{}'", path));
    });
}

reswd_status reswd_cdl_read_xml(const char *path, reswd_cdl *out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        std::ifstream in(path, std::ios::binary);
        if (!in)
            reswd::fail(reswd::ErrorKind::Input, fmt::format("cannot open '{}'", path));
        const std::string text((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        *out = from_core(reswd::cdl_xml_read(text));
    });
}

reswd_status reswd_color_match(const reswd_image *source, const reswd_image *reference,
                               const reswd_config *cfg, int steps, reswd_cdl *out,
                               reswd_report **report) {
    return guarded([&] {
        need(source, "source");
        need(reference, "reference");
        need(cfg, "cfg");
        need(out, "out");
        reswd::ColorMatchOptions opts;
        opts.steps = steps;
        auto r = reswd::color_match(source->img, reference->img, to_core(*cfg), opts);
        *out = from_core(r.cdl);
        if (report) {
            auto h = std::make_unique<reswd_report>();
            h->report = std::move(r.report);
            *report = h.release();
        }
    });
}

}  // extern "C"
