// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace reswd {

struct ReservoirEntry {
    Direction direction;
    double weight;             // last observed cost D(theta)
    double key;                // u^(1/weight)
    std::int64_t inserted_at;  // step at which the direction entered
};

/// Persistent set of at most `capacity` projection directions.
class Reservoir {
public:
    explicit Reservoir(std::size_t capacity, std::int64_t current_step = 0);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::int64_t current_step() const noexcept { return step_; }
    /// Dimension of the stored directions, 0 when empty.
    std::size_t dim() const noexcept;

    const std::vector<ReservoirEntry> &entries() const noexcept { return entries_; }
    std::vector<ReservoirEntry> &entries() noexcept { return entries_; }

    void set_current_step(std::int64_t t) { step_ = t; }
    /// Replaces the contents; throws if `entries` exceeds the capacity.
    void assign(std::vector<ReservoirEntry> entries);
    void clear() noexcept { entries_.clear(); }

private:
    std::size_t capacity_;
    std::int64_t step_;
    std::vector<ReservoirEntry> entries_;
};

/// Ages stored weights and keys by exp(-(t - t_i) / tau). tau == 0 disables it.
void decay(Reservoir &reservoir, std::int64_t t, double tau);

/// Efraimidis-Spirakis key u^(1/weight) for a fresh uniform u.
double make_key(double weight, Rng &rng);

struct Candidate {
    Direction direction;
    double cost;
};

struct SelectionResult {
    std::vector<ReservoirEntry> survivors;
    std::vector<std::size_t> pool_index;  // position of each survivor in the pool
    std::vector<double> probabilities;    // q = D / sum over the pool
    std::vector<double> norm_weights;     // (1/q) normalized to sum to 1
    double ess = 0.0;
    bool degenerate = false;  // every pool cost was zero
};

/// Weighted reservoir selection over the pool [stored entries..., fresh...].
///
/// Stored entries are re-keyed with `stored_costs` (this step's D); the
/// min(K, eligible) members with the largest keys survive. Zero-cost members
/// are ineligible unless the whole pool is zero, which yields the degenerate
/// uniform result over the first min(K, pool) members.
SelectionResult select(const Reservoir &reservoir, std::span<const double> stored_costs,
                       std::span<const Candidate> fresh, std::int64_t step, Rng &rng);

/// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// True when the reservoir must be flushed: ess < alpha * k.
bool ess_check(const SelectionResult &result, double alpha, std::size_t k);

/// Versioned text snapshot; doubles are written in shortest round-trip form.
void write_snapshot(std::ostream &out, const Reservoir &reservoir);
Reservoir read_snapshot(std::istream &in);

}  // namespace reswd
