// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace reswd {

/// Deterministic generator: xoshiro256** seeded through splitmix64.
///
/// The integer stream is fully determined by the seed and identical on every
/// platform. Floating-point draws derive from the top 53 bits of each output.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in (0, 1); never returns 0 or 1.
    double uniform_open();
    /// Standard normal via Box-Muller (one cosine branch per call).
    double normal();
    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Independent generator for a numbered sub-stream of `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

    bool operator==(const Rng &) const = default;

private:
    std::uint64_t s_[4];
};

/// splitmix64 finalizer; used for seeding and for deriving sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t &state);

/// N x d row-major matrix of finite doubles.
class SampleSet {
public:
    SampleSet() = default;
    SampleSet(std::size_t n_points, std::size_t dim);
    SampleSet(std::size_t n_points, std::size_t dim, std::vector<double> data);

    std::size_t n_points() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * d_, d_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }
    double &at(std::size_t i, std::size_t k) { return data_[i * d_ + k]; }
    double at(std::size_t i, std::size_t k) const { return data_[i * d_ + k]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool all_finite() const;

    bool operator==(const SampleSet &) const = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
};

/// Unit vector on S^{d-1}.
class Direction {
public:
    /// Normalizes `v`; throws on zero or non-finite input.
    static Direction normalized(std::vector<double> v);
    /// Keeps `v` bit-for-bit; throws unless its norm is 1 within 1e-9.
    static Direction from_unit(std::vector<double> v);

    std::size_t dim() const noexcept { return v_.size(); }
    std::span<const double> values() const noexcept { return v_; }
    double operator[](std::size_t k) const { return v_[k]; }

    bool operator==(const Direction &) const = default;

private:
    explicit Direction(std::vector<double> v) : v_(std::move(v)) {}
    std::vector<double> v_;
};

/// `count` i.i.d. directions uniform on the sphere (normalized Gaussians).
std::vector<Direction> sample_directions(Rng &rng, std::size_t count, std::size_t dim);

/// out[i] = <samples.row(i), direction>.
std::vector<double> project(const SampleSet &samples, const Direction &direction);
void project_into(const SampleSet &samples, std::span<const double> direction,
                  std::span<double> out);

}  // namespace reswd
