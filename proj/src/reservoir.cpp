// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "reservoir.hpp"

#include "error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace reswd {

Reservoir::Reservoir(std::size_t capacity, std::int64_t current_step)
    : capacity_(capacity), step_(current_step) {
    require(capacity >= 1, "Reservoir: capacity must be >= 1");
}

std::size_t Reservoir::dim() const noexcept {
    return entries_.empty() ? 0 : entries_.front().direction.dim();
}

void Reservoir::assign(std::vector<ReservoirEntry> entries) {
    require(entries.size() <= capacity_, "Reservoir: more entries than capacity");
    entries_ = std::move(entries);
}

void decay(Reservoir &reservoir, std::int64_t t, double tau) {
    require(tau >= 0.0 && std::isfinite(tau), "decay: tau must be a finite value >= 0");
    for (const auto &e : reservoir.entries())
        require(t >= e.inserted_at, "decay: step precedes an entry's insertion step");
    if (tau == 0.0)
        return;
    for (auto &e : reservoir.entries()) {
        const double f = std::exp(-static_cast<double>(t - e.inserted_at) / tau);
        e.weight *= f;
        e.key *= f;
    }
}

double make_key(double weight, Rng &rng) {
    require(weight > 0.0 && std::isfinite(weight), "make_key: weight must be positive and finite");
    return std::pow(rng.uniform_open(), 1.0 / weight);
}

double effective_sample_size(std::span<const double> weights) {
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
        s += w;
        s2 += w * w;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

bool ess_check(const SelectionResult &result, double alpha, std::size_t k) {
    return result.ess < alpha * static_cast<double>(k);
}

SelectionResult select(const Reservoir &reservoir, std::span<const double> stored_costs,
                       std::span<const Candidate> fresh, std::int64_t step, Rng &rng) {
    const auto &stored = reservoir.entries();
    require(stored_costs.size() == stored.size(), "select: one cost per stored entry is required");
    const std::size_t pool = stored.size() + fresh.size();
    require(pool >= 1, "select: the candidate pool is empty");

    auto cost_of = [&](std::size_t i) {
        return i < stored.size() ? stored_costs[i] : fresh[i - stored.size()].cost;
    };
    auto direction_of = [&](std::size_t i) -> const Direction & {
        return i < stored.size() ? stored[i].direction : fresh[i - stored.size()].direction;
    };

    double total = 0.0;
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < pool; ++i) {
        const double c = cost_of(i);
        require(c >= 0.0 && std::isfinite(c), "select: costs must be finite and >= 0");
        total += c;
        eligible += c > 0.0;
    }

    // One uniform per pool member, in pool order. Ranking uses log(u)/w,
    // which orders like u^(1/w) without underflowing for tiny weights.
    std::vector<double> log_key(pool);
    for (std::size_t i = 0; i < pool; ++i) {
        const double u = rng.uniform_open();
        const double c = cost_of(i);
        log_key[i] = c > 0.0 ? std::log(u) / c : -std::numeric_limits<double>::infinity();
    }

    SelectionResult out;
    const std::size_t k = reservoir.capacity();
    std::vector<std::size_t> order(pool);
    std::iota(order.begin(), order.end(), 0);

    if (eligible == 0) {
        out.degenerate = true;
        order.resize(std::min(k, pool));
        const double w = 1.0 / static_cast<double>(order.size());
        for (std::size_t i : order) {
            out.pool_index.push_back(i);
            out.survivors.push_back(
                {direction_of(i), 0.0, 0.0, i < stored.size() ? stored[i].inserted_at : step});
            out.probabilities.push_back(1.0 / static_cast<double>(pool));
            out.norm_weights.push_back(w);
        }
        out.ess = static_cast<double>(order.size());
        return out;
    }

    const std::size_t keep = std::min(k, eligible);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return log_key[a] > log_key[b] || (log_key[a] == log_key[b] && a < b);
                      });
    order.resize(keep);

    double inv_sum = 0.0;
    for (std::size_t i : order) {
        const double q = cost_of(i) / total;
        out.pool_index.push_back(i);
        out.probabilities.push_back(q);
        out.norm_weights.push_back(1.0 / q);
        inv_sum += 1.0 / q;
        const double key = std::max(std::exp(log_key[i]), std::numeric_limits<double>::min());
        out.survivors.push_back(
            {direction_of(i), cost_of(i), key, i < stored.size() ? stored[i].inserted_at : step});
    }
    for (double &w : out.norm_weights)
        w /= inv_sum;
    out.ess = effective_sample_size(out.norm_weights);
    return out;
}

namespace {

std::string shortest(double v) { return fmt::format("{}", v); }

double parse_double(const std::string &tok, const char *what) {
    double v = 0.0;
    const auto *end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end)
        fail(ErrorKind::Input, fmt::format("reservoir snapshot: bad {} '{}'", what, tok));
    return v;
}

template <class Int> Int parse_int(const std::string &tok, const char *what) {
    Int v = 0;
    const auto *end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end)
        fail(ErrorKind::Input, fmt::format("reservoir snapshot: bad {} '{}'", what, tok));
    return v;
}

std::string expect_field(std::istream &in, const char *name) {
    std::string label, value;
    if (!(in >> label >> value) || label != name)
        fail(ErrorKind::Input, fmt::format("reservoir snapshot: expected '{}'", name));
    return value;
}

}  // namespace

void write_snapshot(std::ostream &out, const Reservoir &reservoir) {
    out << "reswd-reservoir 1\n";
    out << "capacity " << reservoir.capacity() << "\n";
    out << "step " << reservoir.current_step() << "\n";
    out << "dim " << reservoir.dim() << "\n";
    out << "entries " << reservoir.size() << "\n";
    for (const auto &e : reservoir.entries()) {
        out << e.inserted_at << ' ' << shortest(e.weight) << ' ' << shortest(e.key);
        for (double v : e.direction.values())
            out << ' ' << shortest(v);
        out << '\n';
    }
}

Reservoir read_snapshot(std::istream &in) {
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "reswd-reservoir")
        fail(ErrorKind::Input, "reservoir snapshot: missing 'reswd-reservoir' header");
    if (version != "1")
        fail(ErrorKind::Input, fmt::format("reservoir snapshot: unsupported version {}", version));
    const auto capacity = parse_int<std::size_t>(expect_field(in, "capacity"), "capacity");
    const auto step = parse_int<std::int64_t>(expect_field(in, "step"), "step");
    const auto dim = parse_int<std::size_t>(expect_field(in, "dim"), "dim");
    const auto count = parse_int<std::size_t>(expect_field(in, "entries"), "entries");
    if (capacity == 0 || count > capacity)
        fail(ErrorKind::Input, "reservoir snapshot: entry count exceeds capacity");
    if (count > 0 && dim == 0)
        fail(ErrorKind::Input, "reservoir snapshot: zero dimension with entries");

    std::vector<ReservoirEntry> entries;
    entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string tok;
        auto next = [&](const char *what) {
            if (!(in >> tok))
                fail(ErrorKind::Input,
                     fmt::format("reservoir snapshot: truncated at entry {} ({})", i, what));
            return tok;
        };
        const auto inserted = parse_int<std::int64_t>(next("step"), "step");
        const double weight = parse_double(next("weight"), "weight");
        const double key = parse_double(next("key"), "key");
        std::vector<double> v(dim);
        for (auto &x : v)
            x = parse_double(next("direction"), "direction component");
        if (!(weight > 0.0) || !(key > 0.0 && key <= 1.0))
            fail(ErrorKind::Input,
                 fmt::format("reservoir snapshot: entry {} has invalid weight or key", i));
        try {
            entries.push_back({Direction::from_unit(std::move(v)), weight, key, inserted});
        } catch (const Error &e) {
            fail(ErrorKind::Input, fmt::format("reservoir snapshot: entry {}: {}", i, e.what()));
        }
    }
    Reservoir r(capacity, step);
    r.assign(std::move(entries));
    return r;
}

}  // namespace reswd
