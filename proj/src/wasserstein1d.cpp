// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "wasserstein1d.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace reswd {

namespace {

void check_inputs(std::span<const double> a, std::span<const double> b, double p) {
    require(!a.empty() && !b.empty(), "w1d: input lists must be non-empty");
    require(p >= 1.0, "w1d: p must be >= 1");
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::pair<std::vector<double>, std::vector<double>>
equalize_lengths(std::span<const double> a, std::span<const double> b, Rng &rng) {
    require(!a.empty() && !b.empty(), "equalize_lengths: input lists must be non-empty");
    std::vector<double> ea(a.begin(), a.end()), eb(b.begin(), b.end());
    auto pad = [&rng](std::vector<double> &v, std::size_t n) {
        const std::size_t m = v.size();
        while (v.size() < n)
            v.push_back(v[rng.below(m)]);
    };
    const std::size_t n = std::max(a.size(), b.size());
    pad(ea, n);
    pad(eb, n);
    return {std::move(ea), std::move(eb)};
}

double SlicedWorkspace::cost(std::span<const double> a, std::span<const double> b, double p,
                             Rng &rng, std::span<double> grad) {
    check_inputs(a, b, p);
    const std::size_t na = a.size(), nb = b.size(), n = std::max(na, nb);
    require(grad.empty() || grad.size() == na, "w1d: gradient buffer must match |a|");

    // a is padded first, then b, so the rng consumption order is fixed
    a_sorted_.resize(n);
    for (std::size_t i = 0; i < na; ++i)
        a_sorted_[i] = {a[i], static_cast<std::uint32_t>(i)};
    for (std::size_t i = na; i < n; ++i) {
        const auto src = static_cast<std::uint32_t>(rng.below(na));
        a_sorted_[i] = {a[src], src};
    }
    b_sorted_.assign(b.begin(), b.end());
    for (std::size_t i = nb; i < n; ++i)
        b_sorted_.push_back(b[rng.below(nb)]);

    // stable: ties keep list order (original indices, then padded draws)
    sorter_.sort(a_sorted_);
    sorter_.sort(b_sorted_);

    if (!grad.empty())
        std::fill(grad.begin(), grad.end(), 0.0);

    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = a_sorted_[i].value - b_sorted_[i];
            total += diff * diff;
            if (!grad.empty())
                grad[a_sorted_[i].index] += 2.0 * inv_n * diff;
        }
    } else if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = a_sorted_[i].value - b_sorted_[i];
            total += std::abs(diff);
            if (!grad.empty())
                grad[a_sorted_[i].index] += inv_n * sign(diff);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = a_sorted_[i].value - b_sorted_[i];
            const double ad = std::abs(diff);
            total += std::pow(ad, p);
            if (!grad.empty() && ad > 0.0)
                grad[a_sorted_[i].index] += p * inv_n * sign(diff) * std::pow(ad, p - 1.0);
        }
    }
    return total * inv_n;
}

SlicedCost w1d_cost(std::span<const double> a, std::span<const double> b, double p, Rng &rng) {
    SlicedWorkspace ws;
    SlicedCost out;
    out.grad.resize(a.size());
    out.value = ws.cost(a, b, p, rng, out.grad);
    return out;
}

double w_p_distance(std::span<const double> a, std::span<const double> b, double p, Rng &rng) {
    SlicedWorkspace ws;
    const double v = ws.cost(a, b, p, rng, {});
    return std::pow(v, 1.0 / p);
}

double exact_w1(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), "exact_w1: input lists must be non-empty");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    RadixSorter sorter;
    sorter.sort(sa);
    sorter.sort(sb);
    if (sa.size() == sb.size()) {
        double total = 0.0;
        for (std::size_t i = 0; i < sa.size(); ++i)
            total += std::abs(sa[i] - sb[i]);
        return total / static_cast<double>(sa.size());
    }
    // sweep the merged breakpoints accumulating |F_a - F_b| * dx
    const double wa = 1.0 / static_cast<double>(sa.size());
    const double wb = 1.0 / static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, total = 0.0;
    double x = std::min(sa.front(), sb.front());
    while (i < sa.size() || j < sb.size()) {
        const double next_a = i < sa.size() ? sa[i] : INFINITY;
        const double next_b = j < sb.size() ? sb[j] : INFINITY;
        const double next = std::min(next_a, next_b);
        total += std::abs(fa - fb) * (next - x);
        x = next;
        while (i < sa.size() && sa[i] == x) {
            fa += wa;
            ++i;
        }
        while (j < sb.size() && sb[j] == x) {
            fb += wb;
            ++j;
        }
    }
    return total;
}

double true_marginal_w1(const SampleSet &x, const SampleSet &y) {
    require(x.dim() == y.dim(), "true_marginal_w1: dimension mismatch");
    std::vector<double> a(x.n_points()), b(y.n_points());
    double total = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        for (std::size_t i = 0; i < a.size(); ++i)
            a[i] = x.at(i, k);
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = y.at(i, k);
        total += exact_w1(a, b);
    }
    return total / static_cast<double>(x.dim());
}

}  // namespace reswd
