// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace reswd {

/// Value with its position in the (possibly padded) source list.
struct KeyedValue {
    double value;
    std::uint32_t index;
};

/// Stable sort of finite doubles: LSD radix on a coarse monotone key followed
/// by an insertion pass on exact values. Identical to std::stable_sort with
/// operator<.
class RadixSorter {
public:
    void sort(std::vector<double> &values);
    void sort(std::vector<KeyedValue> &values);

private:
    struct Item {
        std::uint32_t key;
        std::uint32_t index;
    };
    // leaves the stable sorting permutation of `values` in items_
    void sort_order(std::span<const double> values);

    std::vector<Item> items_, scratch_;
    std::vector<double> gather_;
    std::vector<KeyedValue> keyed_;
};

}  // namespace reswd
