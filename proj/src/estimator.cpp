// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "estimator.hpp"

#include "error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace reswd {

void ReswdConfig::validate() const {
    auto bad = [](const std::string &m) { fail(ErrorKind::Config, m); };
    if (total_projections < 1)
        bad("projections must be >= 1");
    if (fresh_count < 1 || fresh_count > total_projections)
        bad("fresh must be in [1, projections]");
    if (reservoir_capacity() < 1)
        bad("fresh must leave reservoir capacity >= 1");
    if (!(p >= 1.0) || !std::isfinite(p))
        bad("p must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0))
        bad("alpha must be in (0, 1]");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        bad("tau must be >= 0");
}

namespace {

void check_shapes(const SampleSet &x, const SampleSet &y) {
    require(x.n_points() >= 1 && y.n_points() >= 1, "estimator: empty sample set");
    require(x.dim() == y.dim(),
            fmt::format("estimator: dimension mismatch ({} vs {})", x.dim(), y.dim()));
}

// Costs and 1-D gradients for a list of directions, stored row per direction.
class PoolEvaluation {
public:
    PoolEvaluation(const SampleSet &x, const SampleSet &y) : x_(x), y_(y) {}

    void evaluate(std::span<const double> direction, double p, Rng &rng) {
        const std::size_t nx = x_.n_points();
        px_.resize(nx);
        py_.resize(y_.n_points());
        project_into(x_, direction, px_);
        project_into(y_, direction, py_);
        const std::size_t row = costs_.size();
        grads_.resize((row + 1) * nx);
        costs_.push_back(
            ws_.cost(px_, py_, p, rng, std::span<double>(grads_).subspan(row * nx, nx)));
    }

    const std::vector<double> &costs() const { return costs_; }

    // grad += weight * g_row (outer) direction
    void pull_back(std::size_t row, double weight, std::span<const double> direction,
                   SampleSet &grad) const {
        const std::size_t n = x_.n_points(), d = x_.dim();
        const double *g = grads_.data() + row * n;
        double *out = grad.values().data();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = weight * g[i];
            if (s == 0.0)
                continue;
            for (std::size_t k = 0; k < d; ++k)
                out[i * d + k] += s * direction[k];
        }
    }

private:
    const SampleSet &x_;
    const SampleSet &y_;
    SlicedWorkspace ws_;
    std::vector<double> px_, py_;
    std::vector<double> costs_;
    std::vector<double> grads_;
};

}  // namespace

EstimateResult swd_estimate(const SampleSet &x, const SampleSet &y, int projections, double p,
                            Rng &rng) {
    check_shapes(x, y);
    require(projections >= 1, "swd_estimate: projections must be >= 1");
    require(p >= 1.0, "swd_estimate: p must be >= 1");

    auto dirs = sample_directions(rng, static_cast<std::size_t>(projections), x.dim());
    PoolEvaluation pool(x, y);
    for (const auto &dir : dirs)
        pool.evaluate(dir.values(), p, rng);

    EstimateResult out;
    out.grad = SampleSet(x.n_points(), x.dim());
    const double w = 1.0 / static_cast<double>(projections);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        out.value += w * pool.costs()[i];
        pool.pull_back(i, w, dirs[i].values(), out.grad);
    }
    out.ess = static_cast<double>(projections);
    out.per_direction_costs = pool.costs();
    out.weights.assign(dirs.size(), w);
    out.directions = std::move(dirs);
    out.cost_evaluations = out.per_direction_costs.size();
    return out;
}

std::pair<EstimateResult, Reservoir> reswd_step(const SampleSet &x, const SampleSet &y,
                                                Reservoir reservoir, const ReswdConfig &cfg,
                                                std::int64_t t, Rng &rng) {
    cfg.validate();
    check_shapes(x, y);
    if (reservoir.capacity() != static_cast<std::size_t>(cfg.reservoir_capacity()))
        fail(ErrorKind::Config, "reswd_step: reservoir capacity differs from projections - fresh");
    require(reservoir.empty() || reservoir.dim() == x.dim(),
            "reswd_step: reservoir direction dimension differs from the samples");
    require(t >= reservoir.current_step(), "reswd_step: step precedes the reservoir's step");

    // Step 0: age stored weights and keys.
    decay(reservoir, t, cfg.tau);

    // Step 1: pool = stored directions followed by M fresh ones.
    auto fresh_dirs = sample_directions(rng, static_cast<std::size_t>(cfg.fresh_count), x.dim());

    // Step 2: cost of every pool member, then weighted selection.
    PoolEvaluation pool(x, y);
    for (const auto &e : reservoir.entries())
        pool.evaluate(e.direction.values(), cfg.p, rng);
    for (const auto &dir : fresh_dirs)
        pool.evaluate(dir.values(), cfg.p, rng);

    const std::size_t n_stored = reservoir.size();
    std::span<const double> stored_costs(pool.costs().data(), n_stored);
    std::vector<Candidate> fresh;
    fresh.reserve(fresh_dirs.size());
    for (std::size_t i = 0; i < fresh_dirs.size(); ++i)
        fresh.push_back({std::move(fresh_dirs[i]), pool.costs()[n_stored + i]});

    SelectionResult sel = select(reservoir, stored_costs, fresh, t, rng);

    // Step 3: self-normalized estimate over survivors only.
    EstimateResult out;
    out.grad = SampleSet(x.n_points(), x.dim());
    out.per_direction_costs = pool.costs();
    out.cost_evaluations = out.per_direction_costs.size();
    out.ess = sel.ess;
    out.degenerate = sel.degenerate;
    if (!sel.degenerate) {
        for (std::size_t s = 0; s < sel.survivors.size(); ++s) {
            const std::size_t row = sel.pool_index[s];
            const double w = sel.norm_weights[s];
            out.value += w * pool.costs()[row];
            pool.pull_back(row, w, sel.survivors[s].direction.values(), out.grad);
        }
    }
    out.weights = sel.norm_weights;
    for (const auto &s : sel.survivors)
        out.directions.push_back(s.direction);

    // Step 4: flush after the estimate is formed; the caller sees it next step.
    Reservoir next(reservoir.capacity(), t);
    out.flushed = sel.degenerate || ess_check(sel, cfg.alpha, sel.survivors.size());
    if (!out.flushed)
        next.assign(std::move(sel.survivors));
    return {std::move(out), std::move(next)};
}

ReswdEstimator::ReswdEstimator(const ReswdConfig &cfg) : cfg_(cfg), reservoir_(1), rng_(cfg.seed) {
    cfg_.validate();
    reservoir_ = Reservoir(static_cast<std::size_t>(cfg_.reservoir_capacity()));
}

EstimateResult ReswdEstimator::step(const SampleSet &x, const SampleSet &y) {
    ++t_;
    auto [result, next] = reswd_step(x, y, std::move(reservoir_), cfg_, t_, rng_);
    reservoir_ = std::move(next);
    return std::move(result);
}

void ReswdEstimator::set_reservoir(Reservoir r) {
    if (r.capacity() != static_cast<std::size_t>(cfg_.reservoir_capacity()))
        fail(ErrorKind::Config, "set_reservoir: capacity differs from projections - fresh");
    t_ = r.current_step();
    reservoir_ = std::move(r);
}

}  // namespace reswd
