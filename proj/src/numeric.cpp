// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "numeric.hpp"

#include "error.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace reswd {

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto &s : s_)
        s = splitmix64(state);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double Rng::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    require(bound > 0, "Rng::below: bound must be positive");
    // rejection on the largest multiple of bound
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t state = seed ^ 0x5DEECE66DULL;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (stream_id * 0xD1342543DE82EF95ULL);
    return Rng(splitmix64(state));
}

SampleSet::SampleSet(std::size_t n_points, std::size_t dim)
    : n_(n_points), d_(dim), data_(n_points * dim, 0.0) {
    require(n_points >= 1 && dim >= 1, "SampleSet: n_points and dim must be >= 1");
}

SampleSet::SampleSet(std::size_t n_points, std::size_t dim, std::vector<double> data)
    : n_(n_points), d_(dim), data_(std::move(data)) {
    require(n_points >= 1 && dim >= 1, "SampleSet: n_points and dim must be >= 1");
    require(data_.size() == n_points * dim, "SampleSet: data size does not match n_points * dim");
    require(all_finite(), "SampleSet: entries must be finite");
}

bool SampleSet::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v))
            return false;
    return true;
}

Direction Direction::normalized(std::vector<double> v) {
    require(!v.empty(), "Direction: dimension must be >= 1");
    double sq = 0.0;
    for (double x : v)
        sq += x * x;
    require(std::isfinite(sq) && sq > 0.0,
            "Direction: cannot normalize a zero or non-finite vector");
    const double inv = 1.0 / std::sqrt(sq);
    for (double &x : v)
        x *= inv;
    return Direction(std::move(v));
}

Direction Direction::from_unit(std::vector<double> v) {
    require(!v.empty(), "Direction: dimension must be >= 1");
    double sq = 0.0;
    for (double x : v)
        sq += x * x;
    require(std::isfinite(sq) && std::abs(std::sqrt(sq) - 1.0) <= 1e-9,
            "Direction: vector is not unit length");
    return Direction(std::move(v));
}

std::vector<Direction> sample_directions(Rng &rng, std::size_t count, std::size_t dim) {
    require(count >= 1, "sample_directions: count must be >= 1");
    require(dim >= 1, "sample_directions: dim must be >= 1");
    std::vector<Direction> out;
    out.reserve(count);
    std::vector<double> v(dim);
    while (out.size() < count) {
        double sq = 0.0;
        for (auto &x : v) {
            x = rng.normal();
            sq += x * x;
        }
        if (sq == 0.0)
            continue;
        out.push_back(Direction::normalized(v));
    }
    return out;
}

void project_into(const SampleSet &samples, std::span<const double> direction,
                  std::span<double> out) {
    const std::size_t n = samples.n_points(), d = samples.dim();
    require(direction.size() == d, "project: dimension mismatch between samples and direction");
    require(out.size() == n, "project: output length must equal n_points");
    const double *x = samples.values().data();
    if (d == 3) {
        const double t0 = direction[0], t1 = direction[1], t2 = direction[2];
        for (std::size_t i = 0; i < n; ++i, x += 3)
            out[i] = x[0] * t0 + x[1] * t1 + x[2] * t2;
        return;
    }
    for (std::size_t i = 0; i < n; ++i, x += d) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            acc += x[k] * direction[k];
        out[i] = acc;
    }
}

std::vector<double> project(const SampleSet &samples, const Direction &direction) {
    std::vector<double> out(samples.n_points());
    project_into(samples, direction.values(), out);
    return out;
}

}  // namespace reswd
