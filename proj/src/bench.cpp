// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "bench.hpp"

#include "error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

namespace reswd {

const char *family_name(Family f) {
    switch (f) {
    case Family::Normal:
        return "normal";
    case Family::Uniform:
        return "uniform";
    case Family::Bimodal:
        return "bimodal-normal";
    }
    return "?";
}

void DistributionSpec::validate() const {
    require(!mean.empty(), "DistributionSpec: dim must be >= 1");
    require(scale.size() == mean.size(), "DistributionSpec: scale size differs from dim");
    for (double s : scale)
        require(s > 0.0, "DistributionSpec: scales must be positive");
    if (family == Family::Bimodal) {
        require(axis.size() == mean.size(), "DistributionSpec: bimodal axis size differs from dim");
        require(weight > 0.0 && weight < 1.0,
                "DistributionSpec: bimodal weight must lie in (0, 1)");
    }
}

DistributionSpec random_spec(Rng &rng, std::size_t dim) {
    require(dim >= 1, "random_spec: dim must be >= 1");
    auto between = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    DistributionSpec s;
    s.family = static_cast<Family>(rng.below(3));
    for (std::size_t k = 0; k < dim; ++k)
        s.mean.push_back(between(-kMeanRange, kMeanRange));
    for (std::size_t k = 0; k < dim; ++k)
        s.scale.push_back(between(kScaleMin, kScaleMax));
    if (s.family == Family::Bimodal) {
        auto axis = sample_directions(rng, 1, dim).front();
        s.axis.assign(axis.values().begin(), axis.values().end());
        s.separation = between(kSeparationMin, kSeparationMax);
        s.weight = between(kWeightMin, kWeightMax);
    }
    return s;
}

SampleSet sample_distribution(const DistributionSpec &spec, std::size_t n, Rng &rng) {
    spec.validate();
    const std::size_t d = spec.dim();
    SampleSet out(n, d);
    const double half_width = std::sqrt(3.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = out.row(i);
        switch (spec.family) {
        case Family::Normal:
            for (std::size_t k = 0; k < d; ++k)
                row[k] = spec.mean[k] + spec.scale[k] * rng.normal();
            break;
        case Family::Uniform:
            for (std::size_t k = 0; k < d; ++k)
                row[k] = spec.mean[k] + spec.scale[k] * half_width * (2.0 * rng.uniform() - 1.0);
            break;
        case Family::Bimodal: {
            const double side = rng.uniform() < spec.weight ? 0.5 : -0.5;
            for (std::size_t k = 0; k < d; ++k)
                row[k] = spec.mean[k] + side * spec.separation * spec.axis[k] +
                         spec.scale[k] * rng.normal();
            break;
        }
        }
    }
    return out;
}

DistributionPair generate_pair(Rng &rng, std::size_t dim, std::size_t n) {
    DistributionPair p;
    p.spec_x = random_spec(rng, dim);
    p.spec_y = random_spec(rng, dim);
    p.x = sample_distribution(p.spec_x, n, rng);
    p.y = sample_distribution(p.spec_y, n, rng);
    return p;
}

void BenchConfig::validate() const {
    auto bad = [](const std::string &m) { fail(ErrorKind::Config, m); };
    if (n_pairs < 1)
        bad("pairs must be >= 1");
    if (n_samples < 1)
        bad("samples must be >= 1");
    if (dim < 1)
        bad("dim must be >= 1");
    if (steps < 1)
        bad("steps must be >= 1");
    if (seeds_per_pair < 1)
        bad("seeds per pair must be >= 1");
    if (methods.empty())
        bad("at least one method is required");
    if (!(optimizer.lr > 0.0))
        bad("lr must be positive");
    for (const auto &m : methods) {
        ReswdConfig c = estimator;
        if (m.method == Method::Reswd)
            c.fresh_count = m.fresh;
        c.validate();
    }
}

const MethodSummary &BenchReport::method(const std::string &name) const {
    for (const auto &m : methods)
        if (m.name == name)
            return m;
    fail(ErrorKind::InvalidArgument, fmt::format("bench report has no method '{}'", name));
}

std::uint64_t run_seed(std::uint64_t seed, int pair, int repeat) {
    const auto id = (std::uint64_t{1} << 40) + (static_cast<std::uint64_t>(pair) << 16) +
                    static_cast<std::uint64_t>(repeat);
    return Rng::stream(seed, id).next_u64();
}

DistributionPair bench_pair(const BenchConfig &cfg, int pair) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(pair));
    return generate_pair(rng, static_cast<std::size_t>(cfg.dim),
                         static_cast<std::size_t>(cfg.n_samples));
}

RunRecord run_single(const BenchConfig &cfg, const DistributionPair &data, int pair, int repeat,
                     std::size_t method) {
    const MethodSpec &m = cfg.methods.at(method);
    RunRecord rec;
    rec.pair = pair;
    rec.repeat = repeat;
    rec.method = method;
    rec.seed = run_seed(cfg.seed, pair, repeat);
    ReswdConfig ec = cfg.estimator;
    ec.seed = rec.seed;
    if (m.method == Method::Reswd)
        ec.fresh_count = m.fresh;
    try {
        MatchReport r = match_particles(data.x, data.y, ec, cfg.steps, cfg.optimizer, m.method);
        rec.steps = std::move(r.steps);
        rec.final_mean_w1 = r.final_mean_w1;
    } catch (const Error &e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

BenchReport run_benchmark(const BenchConfig &cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t per_pair = static_cast<std::size_t>(cfg.seeds_per_pair) * n_methods;
    const std::size_t total = static_cast<std::size_t>(cfg.n_pairs) * per_pair;
    std::vector<RunRecord> runs(total);

    // one task per pair so the pair data is generated once
    std::atomic<int> next_pair{0};
    auto worker = [&] {
        for (int pair = next_pair++; pair < cfg.n_pairs; pair = next_pair++) {
            const DistributionPair data = bench_pair(cfg, pair);
            for (int r = 0; r < cfg.seeds_per_pair; ++r)
                for (std::size_t m = 0; m < n_methods; ++m)
                    runs[static_cast<std::size_t>(pair) * per_pair +
                         static_cast<std::size_t>(r) * n_methods + m] =
                        run_single(cfg, data, pair, r, m);
        }
    };
    const int jobs = std::max(1, std::min(cfg.jobs, cfg.n_pairs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    return aggregate(cfg, std::move(runs));
}

double pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length lists of >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

BenchReport aggregate(const BenchConfig &cfg, std::vector<RunRecord> runs) {
    BenchReport report;
    const auto steps = static_cast<std::size_t>(cfg.steps);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        MethodSummary s;
        s.name = cfg.methods[m].name;
        std::vector<const RunRecord *> ok;
        for (const auto &r : runs) {
            if (r.method != m)
                continue;
            if (r.failed || r.steps.size() != steps) {
                s.failed_runs.push_back(fmt::format("{}/{}/{}", r.pair, r.repeat, r.seed));
                continue;
            }
            ok.push_back(&r);
        }
        if (!s.failed_runs.empty())
            report.warnings.push_back(
                fmt::format("{}: {} run(s) failed and are excluded", s.name, s.failed_runs.size()));
        s.runs = ok.size();
        if (ok.empty()) {
            report.warnings.push_back(fmt::format("{}: no successful runs", s.name));
            report.methods.push_back(std::move(s));
            continue;
        }
        const double inv = 1.0 / static_cast<double>(ok.size());
        s.mean_w1.assign(steps, 0.0);
        s.wall_ms_mean.assign(steps, 0.0);
        std::vector<double> loss(ok.size()), w1(ok.size());
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t i = 0; i < ok.size(); ++i) {
                const StepRecord &st = ok[i]->steps[t];
                s.mean_w1[t] += st.mean_w1 * inv;
                s.wall_ms_mean[t] += st.wall_ms * inv;
                loss[i] = st.loss;
                w1[i] = st.mean_w1;
            }
            if (ok.size() >= kMinCorrelationRuns)
                s.pearson_corr.push_back(pearson(loss, w1));
        }
        for (const auto *r : ok)
            s.final_mean_w1 += r->final_mean_w1 * inv;

        std::vector<double> timing(
            s.wall_ms_mean.begin() +
                std::min<std::ptrdiff_t>(kTimingWarmupSteps - 1,
                                         static_cast<std::ptrdiff_t>(steps) - 1),
            s.wall_ms_mean.end());
        std::nth_element(timing.begin(),
                         timing.begin() + static_cast<std::ptrdiff_t>(timing.size() / 2),
                         timing.end());
        s.ms_per_step = timing[timing.size() / 2];
        report.methods.push_back(std::move(s));
    }
    report.runs = std::move(runs);
    return report;
}

void write_series_csv(std::ostream &out, const MethodSummary &s, bool timing) {
    const bool corr = !s.pearson_corr.empty();
    out << (corr ? "step,mean_w1,pearson_corr,wall_ms_mean\n" : "step,mean_w1,wall_ms_mean\n");
    for (std::size_t t = 0; t < s.mean_w1.size(); ++t) {
        const double ms = timing ? s.wall_ms_mean[t] : 0.0;
        if (corr)
            out << fmt::format("{},{},{},{}\n", t + 1, s.mean_w1[t], s.pearson_corr[t], ms);
        else
            out << fmt::format("{},{},{}\n", t + 1, s.mean_w1[t], ms);
    }
}

std::string summary_json(const BenchReport &report, bool timing) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto &m : report.methods)
        j[m.name] = {{"final_mean_w1", m.final_mean_w1},
                     {"ms_per_step", timing ? m.ms_per_step : 0.0}};
    return j.dump(2);
}

}  // namespace reswd
