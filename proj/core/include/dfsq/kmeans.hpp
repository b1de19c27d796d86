// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dfsq {

struct KMeansConfig {
    std::size_t k = 4;
    std::size_t max_iters = 50;
    std::size_t trials = 3;
    std::uint64_t seed = 0;
    double tol = 1e-6; // relative SSE improvement below which a run stops
};

struct KMeansResult {
    std::vector<double> centroids;            // ascending
    std::vector<std::uint32_t> assignments;   // per input datum, into centroids
    double sse = 0.0;
    std::size_t iterations = 0;
    std::vector<double> sse_history;          // SSE after each Lloyd step
};

/// One seeded run of 1-D Lloyd's algorithm with k-means++ initialization.
///
/// The data is sorted internally, so results are invariant under input
/// permutation; assignments are reported in input order against ascending
/// centroids. Clusters that go empty are re-seeded on the datum farthest from
/// its current centroid, keeping exactly k centroids. config.trials is
/// ignored here.
KMeansResult kmeans_1d(std::span<const float> data, const KMeansConfig& config);

/// config.trials independent runs seeded config.seed, config.seed + 1, ...;
/// returns the run with minimum SSE (ties to the lowest trial index).
KMeansResult kmeans_best_of_trials(std::span<const float> data, const KMeansConfig& config);

} // namespace dfsq
