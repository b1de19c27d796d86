// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests. They share no
// code with the library paths they check.
#pragma once

#include "dfsq/universal_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

namespace dfsq::test {

/// Optimal 1-D k-partition SSE by dynamic programming on sorted data,
/// O(n^2 k). Lower-bounds any Lloyd run.
inline double optimal_partition_sse(std::vector<double> xs, std::size_t k) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s1[i + 1] = s1[i] + xs[i];
        s2[i + 1] = s2[i] + xs[i] * xs[i];
    }
    auto cost = [&](std::size_t a, std::size_t b) { // SSE of segment [a, b)
        const double cnt = static_cast<double>(b - a);
        const double sum = s1[b] - s1[a];
        return std::max(0.0, (s2[b] - s2[a]) - sum * sum / cnt);
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(n + 1, inf), cur(n + 1, inf);
    for (std::size_t i = 1; i <= n; ++i) prev[i] = cost(0, i);
    for (std::size_t j = 2; j <= k; ++j) {
        cur.assign(n + 1, inf);
        cur[0] = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t m = j - 1 <= i ? j - 1 : i; m < i; ++m)
                cur[i] = std::min(cur[i], prev[m] + cost(m, i));
            // Fewer data than clusters: splitting every point is free.
            if (i < j) cur[i] = 0.0;
        }
        std::swap(prev, cur);
    }
    return k >= 1 ? prev[n] : inf;
}

/// Brute-force universal-set enumeration on a 2^-40 fixed-point grid,
/// independent of the library's representation.
inline std::vector<double> enumerate_universal_oracle(const UniversalSetConfig& config) {
    const std::size_t m = config.word_sets.size();
    std::vector<std::vector<std::int64_t>> elems(m);
    for (std::size_t s = 0; s < m; ++s)
        for (double e : config.word_sets[s].elements)
            elems[s].push_back(static_cast<std::int64_t>(std::llround(std::ldexp(e, 40))));

    std::set<std::int64_t> sums;
    std::vector<std::int64_t> partial{0};
    for (std::size_t s = 0; s < m; ++s) {
        std::vector<std::int64_t> next;
        next.reserve(partial.size() * elems[s].size());
        for (std::int64_t p : partial)
            for (std::int64_t e : elems[s]) next.push_back(p + e);
        partial = std::move(next);
    }
    for (std::int64_t v : partial) sums.insert(v);

    std::set<double> values;
    for (std::int64_t v : sums) {
        const double x = std::ldexp(static_cast<double>(v), -40) / static_cast<double>(m);
        values.insert(x);
        if (config.include_negatives) values.insert(-x);
    }
    return {values.begin(), values.end()};
}

/// Nearest point by linear scan, ties to the smaller point.
inline double brute_nearest(double x, const std::vector<double>& points) {
    double best = points.front();
    double best_d = std::abs(x - best);
    for (double p : points) {
        const double d = std::abs(x - p);
        if (d < best_d) {
            best = p;
            best_d = d;
        }
    }
    return best;
}

} // namespace dfsq::test
