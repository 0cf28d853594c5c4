// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "bench.hpp"
#include "error.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reswd {
namespace {

DistributionSpec normal_spec(std::vector<double> mean, std::vector<double> scale) {
    DistributionSpec s;
    s.family = Family::Normal;
    s.mean = std::move(mean);
    s.scale = std::move(scale);
    return s;
}

TEST(Generators, SameSpecSamplesAreClose) {
    // empirical noise bound per dimension, checked over many seeds
    const std::size_t n = 4096;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const DistributionSpec spec = random_spec(rng, 3);
        const SampleSet a = sample_distribution(spec, n, rng);
        const SampleSet b = sample_distribution(spec, n, rng);
        // per-axis W1 between two samples scales like sd / sqrt(n)
        double max_sd = 0.0;
        for (std::size_t k = 0; k < spec.dim(); ++k) {
            double var = spec.scale[k] * spec.scale[k];
            if (spec.family == Family::Bimodal)
                var +=
                    spec.weight * (1.0 - spec.weight) * std::pow(spec.separation * spec.axis[k], 2);
            max_sd = std::max(max_sd, std::sqrt(var));
        }
        EXPECT_LT(true_marginal_w1(a, b), 4.0 * max_sd / std::sqrt(static_cast<double>(n)))
            << family_name(spec.family) << " seed " << seed;
    }
}

TEST(Generators, EqualVarianceNormalsAreShiftApart) {
    Rng rng(1);
    const SampleSet a = sample_distribution(normal_spec({0.0}, {1.0}), 1024, rng);
    const SampleSet b = sample_distribution(normal_spec({5.0}, {1.0}), 1024, rng);
    EXPECT_NEAR(true_marginal_w1(a, b), 5.0, 0.5);
}

TEST(Generators, BimodalHasTwoModes) {
    Rng rng(2);
    DistributionSpec s;
    s.family = Family::Bimodal;
    s.mean = {0.0};
    s.scale = {0.5};
    s.axis = {1.0};
    s.separation = 6.0;
    s.weight = 0.5;
    const SampleSet x = sample_distribution(s, 20000, rng);
    // histogram over [-6, 6] in 0.5-wide bins
    std::vector<int> bins(24, 0);
    for (double v : x.values())
        if (v >= -6.0 && v < 6.0)
            ++bins[static_cast<std::size_t>((v + 6.0) / 0.5)];
    const int peak = *std::max_element(bins.begin(), bins.end());
    const int middle = bins[11] + bins[12];
    EXPECT_LT(middle / 2.0, 0.5 * peak);
    const int left = *std::max_element(bins.begin(), bins.begin() + 10);
    const int right = *std::max_element(bins.begin() + 14, bins.end());
    EXPECT_GT(left, 0.5 * peak);
    EXPECT_GT(right, 0.5 * peak);
}

TEST(Generators, UniformMatchesScale) {
    Rng rng(3);
    DistributionSpec s = normal_spec({1.0, -2.0}, {0.5, 2.0});
    s.family = Family::Uniform;
    const SampleSet x = sample_distribution(s, 50000, rng);
    for (std::size_t k = 0; k < 2; ++k) {
        double m = 0.0, v = 0.0, lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < x.n_points(); ++i) {
            m += x.at(i, k) / 50000.0;
            lo = std::min(lo, x.at(i, k));
            hi = std::max(hi, x.at(i, k));
        }
        for (std::size_t i = 0; i < x.n_points(); ++i)
            v += (x.at(i, k) - m) * (x.at(i, k) - m) / 50000.0;
        EXPECT_NEAR(m, s.mean[k], 0.05 * s.scale[k]);
        EXPECT_NEAR(std::sqrt(v), s.scale[k], 0.02 * s.scale[k]);
        EXPECT_GE(lo, s.mean[k] - std::sqrt(3.0) * s.scale[k]);
        EXPECT_LE(hi, s.mean[k] + std::sqrt(3.0) * s.scale[k]);
    }
}

TEST(Generators, RandomSpecsRespectDeclaredRanges) {
    Rng rng(4);
    int seen[3] = {};
    for (int i = 0; i < 600; ++i) {
        const auto s = random_spec(rng, 3);
        ++seen[static_cast<int>(s.family)];
        EXPECT_NO_THROW(s.validate());
        for (double m : s.mean)
            EXPECT_LE(std::abs(m), kMeanRange);
        for (double c : s.scale) {
            EXPECT_GE(c, kScaleMin);
            EXPECT_LE(c, kScaleMax);
        }
        if (s.family == Family::Bimodal) {
            EXPECT_GE(s.separation, kSeparationMin);
            EXPECT_LE(s.separation, kSeparationMax);
            EXPECT_GE(s.weight, kWeightMin);
            EXPECT_LE(s.weight, kWeightMax);
        }
    }
    for (int c : seen)
        EXPECT_GT(c, 150);
}

TEST(Generators, InvalidSpecs) {
    EXPECT_THROW(normal_spec({0.0}, {0.0}).validate(), Error);
    EXPECT_THROW(normal_spec({0.0, 1.0}, {1.0}).validate(), Error);
    DistributionSpec b = normal_spec({0.0}, {1.0});
    b.family = Family::Bimodal;
    b.axis = {1.0};
    b.weight = 1.0;
    EXPECT_THROW(b.validate(), Error);
}

TEST(Generators, PairsAreDeterministic) {
    BenchConfig cfg;
    cfg.n_samples = 64;
    const auto a = bench_pair(cfg, 7), b = bench_pair(cfg, 7), c = bench_pair(cfg, 8);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.x, c.x);
}

TEST(Pearson, KnownValuesAndBounds) {
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0, 1e-15);
    // hand computed: x = (1, 2, 3, 4), y = (1, 3, 2, 4) -> r = 0.8
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8,
                1e-15);
    EXPECT_EQ(pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2}), 0.0);
    EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
}

RunRecord fake_run(std::size_t method, int pair, double w1_offset, int steps) {
    RunRecord r;
    r.method = method;
    r.pair = pair;
    for (int t = 1; t <= steps; ++t)
        r.steps.push_back({t, w1_offset + 2.0 / t + 0.01 * pair, w1_offset + 1.0 / t, 1.0 + t});
    r.final_mean_w1 = w1_offset;
    return r;
}

TEST(Aggregate, PureReductionOfRunRecords) {
    BenchConfig cfg;
    cfg.steps = 12;
    std::vector<RunRecord> runs;
    for (int p = 0; p < 40; ++p) {
        runs.push_back(fake_run(0, p, 0.1 * p, 12));
        runs.push_back(fake_run(1, p, 0.05 * p, 12));
    }
    const auto a = aggregate(cfg, runs), b = aggregate(cfg, runs);
    ASSERT_EQ(a.methods.size(), 2u);
    EXPECT_EQ(a.methods[0].mean_w1, b.methods[0].mean_w1);
    const auto &swd = a.method("swd");
    EXPECT_EQ(swd.runs, 40u);
    EXPECT_NEAR(swd.final_mean_w1, 0.1 * 19.5, 1e-12);
    EXPECT_NEAR(swd.mean_w1[0], 0.1 * 19.5 + 1.0, 1e-12);
    ASSERT_EQ(swd.pearson_corr.size(), 12u);
    for (double r : swd.pearson_corr) {
        EXPECT_GE(r, -1.0);
        EXPECT_LE(r, 1.0);
    }
    // median over steps 10..12 of 1 + t
    EXPECT_NEAR(swd.ms_per_step, 12.0, 1e-12);
    EXPECT_THROW(a.method("nope"), Error);
}

TEST(Aggregate, FailedRunsAreExcludedWithWarning) {
    BenchConfig cfg;
    cfg.steps = 5;
    std::vector<RunRecord> runs{fake_run(0, 0, 1.0, 5), fake_run(0, 1, 3.0, 5),
                                fake_run(1, 0, 1.0, 5)};
    runs[1].failed = true;
    runs[1].seed = 77;
    const auto rep = aggregate(cfg, runs);
    EXPECT_EQ(rep.method("swd").runs, 1u);
    EXPECT_EQ(rep.method("swd").final_mean_w1, 1.0);
    EXPECT_EQ(rep.method("swd").failed_runs, std::vector<std::string>{"1/0/77"});
    ASSERT_FALSE(rep.warnings.empty());
    // too few runs: the correlation column is dropped
    EXPECT_TRUE(rep.method("swd").pearson_corr.empty());
}

TEST(SeriesCsv, ColumnsWithAndWithoutCorrelation) {
    MethodSummary s;
    s.mean_w1 = {2.0, 1.5};
    s.wall_ms_mean = {0.25, 0.5};
    std::ostringstream a;
    write_series_csv(a, s, true);
    EXPECT_EQ(a.str(), "step,mean_w1,wall_ms_mean\n1,2,0.25\n2,1.5,0.5\n");
    s.pearson_corr = {0.5, 0.75};
    std::ostringstream b, c;
    write_series_csv(b, s, true);
    write_series_csv(c, s, false);
    EXPECT_EQ(b.str(), "step,mean_w1,pearson_corr,wall_ms_mean\n1,2,0.5,0.25\n2,1.5,0.75,0.5\n");
    EXPECT_EQ(c.str(), "step,mean_w1,pearson_corr,wall_ms_mean\n1,2,0.5,0\n2,1.5,0.75,0\n");
}

TEST(SummaryJson, MethodToMetrics) {
    BenchReport r;
    MethodSummary a;
    a.name = "swd";
    a.final_mean_w1 = 0.5;
    a.ms_per_step = 2.0;
    r.methods.push_back(a);
    const auto j = nlohmann::json::parse(summary_json(r));
    EXPECT_EQ(j["swd"]["final_mean_w1"], 0.5);
    EXPECT_EQ(j["swd"]["ms_per_step"], 2.0);
    EXPECT_EQ(nlohmann::json::parse(summary_json(r, false))["swd"]["ms_per_step"], 0.0);
}

TEST(RunBenchmark, MatchedPairsStayAtNoiseFloor) {
    // pairs whose two sides share one sample set: both methods start and stay at zero
    BenchConfig cfg;
    cfg.n_pairs = 2;
    cfg.n_samples = 128;
    cfg.steps = 10;
    std::vector<RunRecord> runs;
    for (int p = 0; p < 2; ++p) {
        auto pair = bench_pair(cfg, p);
        pair.y = pair.x;
        for (std::size_t m = 0; m < 2; ++m)
            runs.push_back(run_single(cfg, pair, p, 0, m));
    }
    const auto rep = aggregate(cfg, runs);
    for (const auto &m : rep.methods)
        EXPECT_EQ(m.final_mean_w1, 0.0) << m.name;
}

TEST(RunBenchmark, DeterministicAndThreadCountIndependent) {
    BenchConfig cfg;
    cfg.n_pairs = 4;
    cfg.n_samples = 64;
    cfg.steps = 8;
    cfg.seed = 5;
    const auto a = run_benchmark(cfg);
    cfg.jobs = 3;
    const auto b = run_benchmark(cfg);
    for (std::size_t m = 0; m < 2; ++m) {
        EXPECT_EQ(a.methods[m].mean_w1, b.methods[m].mean_w1);
        EXPECT_EQ(a.methods[m].final_mean_w1, b.methods[m].final_mean_w1);
    }
    std::ostringstream ca, cb;
    write_series_csv(ca, a.methods[1], false);
    write_series_csv(cb, b.methods[1], false);
    EXPECT_EQ(ca.str(), cb.str());
}

TEST(RunBenchmark, MethodsShareRunSeedsAndPairs) {
    BenchConfig cfg;
    EXPECT_EQ(run_seed(cfg.seed, 3, 1), run_seed(cfg.seed, 3, 1));
    EXPECT_NE(run_seed(cfg.seed, 3, 1), run_seed(cfg.seed, 3, 2));
    EXPECT_NE(run_seed(cfg.seed, 3, 1), run_seed(cfg.seed, 4, 1));
}

TEST(BenchConfig, Validation) {
    BenchConfig cfg;
    cfg.estimator.fresh_count = 64;
    cfg.methods = {{"reswd", Method::Reswd, 64}};
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.n_pairs = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace reswd
