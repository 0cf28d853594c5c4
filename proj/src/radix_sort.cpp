// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "radix_sort.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace reswd {

namespace {

// Monotone 32-bit key: the value rounded to float with negatives
// bit-flipped. Adding +0.0f folds -0.0 into +0.0.
std::uint32_t to_key(double v) {
    auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v) + 0.0f);
    return (u >> 31) ? ~u : (u | (std::uint32_t{1} << 31));
}

constexpr std::size_t kSmall = 64;
constexpr std::size_t kInsertionRun = 16;
// Above this size a third byte of the key is sorted so equal-key runs stay short.
constexpr std::size_t kThreeBytes = 4096;

}  // namespace

// The key is monotone in the value, so a stable sort on it leaves only runs
// of equal keys to order; those are finished on the exact doubles.
void RadixSorter::sort_order(std::span<const double> values) {
    const std::size_t n = values.size();
    items_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        items_[i] = {to_key(values[i]), static_cast<std::uint32_t>(i)};

    // sort on the top `bytes` bytes of the key, least significant first
    const int bytes = n > kThreeBytes ? 3 : 2;
    const int low_shift = 8 * (4 - bytes);
    std::array<std::array<std::uint32_t, 256>, 3> hist{};
    for (std::size_t i = 0; i < n; ++i)
        for (int b = 0; b < bytes; ++b)
            ++hist[b][(items_[i].key >> (low_shift + 8 * b)) & 0xFF];
    scratch_.resize(n);
    for (int b = 0; b < bytes; ++b) {
        auto &h = hist[b];
        const int shift = low_shift + 8 * b;
        if (h[(items_[0].key >> shift) & 0xFF] == n)
            continue;
        std::uint32_t sum = 0;
        for (auto &c : h) {
            const std::uint32_t c0 = c;
            c = sum;
            sum += c0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Item &it = items_[i];
            scratch_[h[(it.key >> shift) & 0xFF]++] = it;
        }
        items_.swap(scratch_);
    }

    auto by_value = [&values](const Item &l, const Item &r) {
        return values[l.index] < values[r.index];
    };
    for (std::size_t lo = 0; lo < n;) {
        std::size_t hi = lo + 1;
        while (hi < n && (items_[hi].key >> low_shift) == (items_[lo].key >> low_shift))
            ++hi;
        if (hi - lo > kInsertionRun) {
            std::stable_sort(items_.begin() + static_cast<std::ptrdiff_t>(lo),
                             items_.begin() + static_cast<std::ptrdiff_t>(hi), by_value);
        } else {
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const Item it = items_[i];
                std::size_t j = i;
                while (j > lo && by_value(it, items_[j - 1])) {
                    items_[j] = items_[j - 1];
                    --j;
                }
                items_[j] = it;
            }
        }
        lo = hi;
    }
}

void RadixSorter::sort(std::vector<double> &values) {
    const std::size_t n = values.size();
    if (n < kSmall) {
        std::stable_sort(values.begin(), values.end());
        return;
    }
    sort_order(values);
    gather_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        gather_[i] = values[items_[i].index];
    values.swap(gather_);
}

void RadixSorter::sort(std::vector<KeyedValue> &values) {
    const std::size_t n = values.size();
    if (n < kSmall) {
        std::stable_sort(
            values.begin(), values.end(),
            [](const KeyedValue &l, const KeyedValue &r) { return l.value < r.value; });
        return;
    }
    gather_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        gather_[i] = values[i].value;
    sort_order(gather_);
    keyed_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        keyed_[i] = values[items_[i].index];
    values.swap(keyed_);
}

}  // namespace reswd
