#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace pairlearn {

// Order-canonical reduction: adds the values in descending sorted order, so
// the result depends only on the multiset of addends, never on their
// arrangement. Reductions over the output-node axis use this everywhere a
// node permutation must leave results bit-identical.
inline double canonical_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n == 1) return values[0];

    auto reduce_sorted_desc = [](double* buf, std::size_t m) {
        // Insertion sort: deterministic and fast at the small sizes used here.
        for (std::size_t i = 1; i < m; ++i) {
            const double key = buf[i];
            std::size_t j = i;
            while (j > 0 && buf[j - 1] < key) {
                buf[j] = buf[j - 1];
                --j;
            }
            buf[j] = key;
        }
        double acc = buf[0];
        for (std::size_t i = 1; i < m; ++i) acc += buf[i];
        return acc;
    };

    if (n <= 64) {
        std::array<double, 64> buf;
        std::copy(values.begin(), values.end(), buf.begin());
        return reduce_sorted_desc(buf.data(), n);
    }
    std::vector<double> buf(values.begin(), values.end());
    std::sort(buf.begin(), buf.end(), std::greater<double>());
    double acc = buf[0];
    for (std::size_t i = 1; i < n; ++i) acc += buf[i];
    return acc;
}

// Canonical inner product: elementwise products reduced with canonical_sum.
inline double canonical_dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n <= 64) {
        std::array<double, 64> prod;
        for (std::size_t k = 0; k < n; ++k) prod[k] = a[k] * b[k];
        return canonical_sum({prod.data(), n});
    }
    std::vector<double> prod(n);
    for (std::size_t k = 0; k < n; ++k) prod[k] = a[k] * b[k];
    return canonical_sum(prod);
}

} // namespace pairlearn
