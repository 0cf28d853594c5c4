// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "optimize.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace reswd {

enum class Family { Normal, Uniform, Bimodal };

const char *family_name(Family f);

/// Synthetic distribution. `scale` is the per-axis standard deviation of the
/// normal and uniform families and of each bimodal component; the bimodal
/// modes sit at mean +- separation/2 * axis with mixture weight `weight` on
/// the + mode.
struct DistributionSpec {
    Family family = Family::Normal;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> axis;
    double separation = 0.0;
    double weight = 0.5;

    std::size_t dim() const noexcept { return mean.size(); }
    void validate() const;
};

// Parameter ranges for random specs.
inline constexpr double kMeanRange = 5.0;  // U[-5, 5] per axis
inline constexpr double kScaleMin = 0.5;   // U[0.5, 2] per axis
inline constexpr double kScaleMax = 2.0;
inline constexpr double kSeparationMin = 2.0;  // U[2, 8]
inline constexpr double kSeparationMax = 8.0;
inline constexpr double kWeightMin = 0.3;  // U[0.3, 0.7]
inline constexpr double kWeightMax = 0.7;

DistributionSpec random_spec(Rng &rng, std::size_t dim);
SampleSet sample_distribution(const DistributionSpec &spec, std::size_t n, Rng &rng);

struct DistributionPair {
    SampleSet x;
    SampleSet y;
    DistributionSpec spec_x;
    DistributionSpec spec_y;
};

DistributionPair generate_pair(Rng &rng, std::size_t dim, std::size_t n);

struct MethodSpec {
    std::string name;
    Method method = Method::Reswd;
    int fresh = 8;  // ignored for SWD
};

struct BenchConfig {
    int n_pairs = 1000;
    int n_samples = 1024;
    int dim = 3;
    int steps = 300;
    int seeds_per_pair = 1;
    ReswdConfig estimator;  // seed field unused; run seeds derive from `seed`
    OptimizerSpec optimizer;
    std::vector<MethodSpec> methods = {{"swd", Method::Swd, 0}, {"reswd", Method::Reswd, 8}};
    std::uint64_t seed = 0;
    int jobs = 1;

    void validate() const;
};

struct RunRecord {
    int pair = 0;
    int repeat = 0;
    std::size_t method = 0;  // index into BenchConfig::methods
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    double final_mean_w1 = 0.0;
    bool failed = false;
    std::string error;
};

inline constexpr std::size_t kMinCorrelationRuns = 30;
inline constexpr int kTimingWarmupSteps = 10;

struct MethodSummary {
    std::string name;
    std::size_t runs = 0;                  // successful runs
    std::vector<double> mean_w1;           // per step, across runs
    std::vector<double> pearson_corr;      // per step; empty below kMinCorrelationRuns
    std::vector<double> wall_ms_mean;      // per step
    double final_mean_w1 = 0.0;            // mean over runs of the post-optimisation W1
    double ms_per_step = 0.0;              // median of wall_ms_mean over steps >= 10
    std::vector<std::string> failed_runs;  // "pair/repeat/seed"
};

struct BenchReport {
    std::vector<MethodSummary> methods;
    std::vector<RunRecord> runs;
    std::vector<std::string> warnings;

    const MethodSummary &method(const std::string &name) const;
};

/// Estimator seed of (pair, repeat); shared by every method for that run.
std::uint64_t run_seed(std::uint64_t seed, int pair, int repeat);

/// Pair data for index `pair`; independent of the methods under test.
DistributionPair bench_pair(const BenchConfig &cfg, int pair);

RunRecord run_single(const BenchConfig &cfg, const DistributionPair &data, int pair, int repeat,
                     std::size_t method);

BenchReport run_benchmark(const BenchConfig &cfg);

/// Pure reduction of run records into per-method summaries.
BenchReport aggregate(const BenchConfig &cfg, std::vector<RunRecord> runs);

double pearson(std::span<const double> a, std::span<const double> b);

/// Columns step,mean_w1,pearson_corr,wall_ms_mean; pearson_corr is left out
/// when the population is too small. `timing == false` writes wall_ms_mean as 0.
void write_series_csv(std::ostream &out, const MethodSummary &summary, bool timing = true);

/// {"<method>": {"final_mean_w1": x, "ms_per_step": y}, ...}; y is 0 when
/// `timing == false`.
std::string summary_json(const BenchReport &report, bool timing = true);

}  // namespace reswd
