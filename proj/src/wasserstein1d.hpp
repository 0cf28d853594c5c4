// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "numeric.hpp"
#include "radix_sort.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace reswd {

/// p-power 1-D transport cost, i.e. mean |a_(i) - b_(i)|^p over order
/// statistics, and its gradient w.r.t. `a` in a's original order.
struct SlicedCost {
    double value = 0.0;
    std::vector<double> grad;
};

/// Pads the shorter list with uniform draws (with replacement) from itself.
std::pair<std::vector<double>, std::vector<double>>
equalize_lengths(std::span<const double> a, std::span<const double> b, Rng &rng);

SlicedCost w1d_cost(std::span<const double> a, std::span<const double> b, double p, Rng &rng);

/// w1d_cost(...).value^(1/p). Reporting only.
double w_p_distance(std::span<const double> a, std::span<const double> b, double p, Rng &rng);

/// Exact W1 between two empirical measures of possibly different sizes,
/// computed as the integral of |F_a - F_b|. No randomness involved.
double exact_w1(std::span<const double> a, std::span<const double> b);

/// Exact W1 per coordinate axis, averaged over the axes.
double true_marginal_w1(const SampleSet &x, const SampleSet &y);

/// Scratch buffers for repeated cost evaluations in the estimator hot loop.
/// Produces results identical to w1d_cost.
class SlicedWorkspace {
public:
    /// Writes d cost / d a into `grad` (length |a|) unless it is empty.
    double cost(std::span<const double> a, std::span<const double> b, double p, Rng &rng,
                std::span<double> grad);

private:
    RadixSorter sorter_;
    std::vector<KeyedValue> a_sorted_;
    std::vector<double> b_sorted_;
};

}  // namespace reswd
