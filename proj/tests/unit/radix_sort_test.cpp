// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "numeric.hpp"
#include "radix_sort.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace reswd {
namespace {

std::vector<KeyedValue> keyed(const std::vector<double> &v) {
    std::vector<KeyedValue> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back({v[i], static_cast<std::uint32_t>(i)});
    return out;
}

void expect_matches_stable_sort(const std::vector<double> &values) {
    RadixSorter sorter;
    auto a = keyed(values);
    auto b = a;
    sorter.sort(a);
    std::stable_sort(b.begin(), b.end(),
                     [](const KeyedValue &x, const KeyedValue &y) { return x.value < y.value; });
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(std::memcmp(&a[i].value, &b[i].value, sizeof(double)), 0) << "position " << i;
        ASSERT_EQ(a[i].index, b[i].index) << "position " << i;
    }
    auto plain = values;
    auto ref = values;
    sorter.sort(plain);
    std::stable_sort(ref.begin(), ref.end());
    for (std::size_t i = 0; i < plain.size(); ++i)
        ASSERT_EQ(std::memcmp(&plain[i], &ref[i], sizeof(double)), 0) << "position " << i;
}

TEST(RadixSorter, RandomNormalsAllSizes) {
    Rng rng(1);
    for (std::size_t n : {0u, 1u, 2u, 17u, 63u, 64u, 65u, 1000u, 1024u, 4096u, 20000u}) {
        std::vector<double> v(n);
        for (double &x : v)
            x = 3.0 * rng.normal();
        expect_matches_stable_sort(v);
    }
}

TEST(RadixSorter, HeavyTiesKeepListOrder) {
    Rng rng(2);
    std::vector<double> v(5000);
    for (double &x : v)
        x = static_cast<double>(rng.below(20)) - 10.0;
    expect_matches_stable_sort(v);
}

TEST(RadixSorter, ValuesSharingCoarseKey) {
    // values differ only far below float precision, so every item lands in one bucket
    Rng rng(3);
    std::vector<double> v(3000);
    for (double &x : v)
        x = 1.0 + 1e-12 * rng.uniform();
    expect_matches_stable_sort(v);
}

TEST(RadixSorter, SignedZeroAndExtremes) {
    Rng rng(4);
    std::vector<double> v;
    for (int i = 0; i < 200; ++i) {
        v.push_back(i % 2 ? 0.0 : -0.0);
        v.push_back(rng.normal() * 1e300);
        v.push_back(rng.normal() * 1e-300);
        v.push_back(std::numeric_limits<double>::denorm_min() * (i % 3 ? 1 : -1));
        v.push_back(-std::numeric_limits<double>::max());
        v.push_back(std::numeric_limits<double>::max());
    }
    expect_matches_stable_sort(v);
}

TEST(RadixSorter, AlreadySortedAndReversed) {
    std::vector<double> v(3000);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(i) * 0.01 - 7.0;
    expect_matches_stable_sort(v);
    std::reverse(v.begin(), v.end());
    expect_matches_stable_sort(v);
}

TEST(RadixSorter, ReusableAcrossCalls) {
    RadixSorter sorter;
    Rng rng(5);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> v(100 + 37 * round);
        for (double &x : v)
            x = rng.normal();
        auto ref = v;
        std::stable_sort(ref.begin(), ref.end());
        sorter.sort(v);
        ASSERT_EQ(v, ref);
    }
}

}  // namespace
}  // namespace reswd
