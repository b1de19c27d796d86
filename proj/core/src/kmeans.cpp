// SPDX-License-Identifier: Apache-2.0
#include "dfsq/kmeans.hpp"

#include "dfsq/errors.hpp"
#include "dfsq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dfsq {

namespace {

struct SortedData {
    std::vector<double> xs;            // ascending
    std::vector<std::uint32_t> order;  // xs[i] == data[order[i]]
    std::vector<double> sum1;          // prefix sums of xs
    std::vector<double> sum2;          // prefix sums of xs^2
};

SortedData prepare(std::span<const float> data) {
    SortedData sd;
    const std::size_t n = data.size();
    sd.order.resize(n);
    std::iota(sd.order.begin(), sd.order.end(), 0u);
    std::sort(sd.order.begin(), sd.order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return data[a] < data[b]; });
    sd.xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) sd.xs[i] = data[sd.order[i]];
    sd.sum1.assign(n + 1, 0.0);
    sd.sum2.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sd.sum1[i + 1] = sd.sum1[i] + sd.xs[i];
        sd.sum2[i + 1] = sd.sum2[i] + sd.xs[i] * sd.xs[i];
    }
    return sd;
}

// Cluster boundaries for ascending centroids: cluster j owns xs in
// (mid_{j-1}, mid_j], where mid is the midpoint of adjacent centroids, so a
// datum exactly at a midpoint goes to the smaller centroid.
std::vector<std::size_t> cluster_bounds(const std::vector<double>& xs,
                                        const std::vector<double>& centroids) {
    const std::size_t k = centroids.size();
    std::vector<std::size_t> bounds(k + 1, 0);
    bounds[k] = xs.size();
    for (std::size_t j = 0; j + 1 < k; ++j) {
        const double mid = 0.5 * (centroids[j] + centroids[j + 1]);
        bounds[j + 1] = static_cast<std::size_t>(
            std::upper_bound(xs.begin(), xs.end(), mid) - xs.begin());
    }
    // Equal adjacent centroids can produce non-monotone cuts; clamp.
    for (std::size_t j = 1; j <= k; ++j) bounds[j] = std::max(bounds[j], bounds[j - 1]);
    return bounds;
}

double sse_for(const SortedData& sd, const std::vector<double>& centroids,
               const std::vector<std::size_t>& bounds) {
    double sse = 0.0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        const std::size_t lo = bounds[j], hi = bounds[j + 1];
        if (lo == hi) continue;
        const double cnt = static_cast<double>(hi - lo);
        const double s1 = sd.sum1[hi] - sd.sum1[lo];
        const double s2 = sd.sum2[hi] - sd.sum2[lo];
        const double c = centroids[j];
        sse += s2 - 2.0 * c * s1 + c * c * cnt;
    }
    return std::max(sse, 0.0);
}

// Means per cluster; empty clusters are re-seeded on the datum farthest from
// its current centroid (distinct datum per repaired cluster).
std::vector<double> update_means(const SortedData& sd, const std::vector<double>& centroids,
                                 const std::vector<std::size_t>& bounds) {
    const std::size_t k = centroids.size();
    std::vector<double> means(k);
    std::vector<std::size_t> empties;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t lo = bounds[j], hi = bounds[j + 1];
        if (lo == hi) {
            empties.push_back(j);
            means[j] = centroids[j];
        } else {
            means[j] = (sd.sum1[hi] - sd.sum1[lo]) / static_cast<double>(hi - lo);
        }
    }
    if (!empties.empty()) {
        std::vector<double> dist(sd.xs.size());
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = bounds[j]; i < bounds[j + 1]; ++i)
                dist[i] = std::abs(sd.xs[i] - means[j]);
        for (std::size_t e : empties) {
            const std::size_t far = static_cast<std::size_t>(
                std::max_element(dist.begin(), dist.end()) - dist.begin());
            means[e] = sd.xs[far];
            dist[far] = -1.0; // consumed
        }
    }
    std::sort(means.begin(), means.end());
    return means;
}

std::vector<double> kmeanspp_init(const SortedData& sd, std::size_t k, Rng& rng) {
    const std::size_t n = sd.xs.size();
    std::vector<double> centroids;
    centroids.reserve(k);
    centroids.push_back(sd.xs[rng.uniform_index(n)]);

    std::vector<double> d2(n);
    for (std::size_t j = 1; j < k; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centroids) best = std::min(best, (sd.xs[i] - c) * (sd.xs[i] - c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // Fewer distinct values than k: fall back to uniform picks.
            centroids.push_back(sd.xs[rng.uniform_index(n)]);
            continue;
        }
        const double r = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= r) {
                pick = i;
                break;
            }
        }
        centroids.push_back(sd.xs[pick]);
    }
    std::sort(centroids.begin(), centroids.end());
    return centroids;
}

} // namespace

KMeansResult kmeans_1d(std::span<const float> data, const KMeansConfig& config) {
    if (data.empty()) throw ValidationError("kmeans_1d: empty data");
    if (config.k < 1) throw ValidationError("kmeans_1d: k must be >= 1");
    if (config.max_iters < 1) throw ValidationError("kmeans_1d: max_iters must be >= 1");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i]))
            throw ValidationError("kmeans_1d: element " + std::to_string(i) + " is not finite");

    const SortedData sd = prepare(data);
    Rng rng(config.seed);

    std::vector<double> centroids = kmeanspp_init(sd, config.k, rng);
    std::vector<std::size_t> bounds = cluster_bounds(sd.xs, centroids);

    KMeansResult result;
    double prev_sse = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool converged = false;
    while (iter < config.max_iters && !converged) {
        ++iter;
        centroids = update_means(sd, centroids, bounds);
        auto new_bounds = cluster_bounds(sd.xs, centroids);
        const double sse = sse_for(sd, centroids, new_bounds);
        result.sse_history.push_back(sse);

        converged = new_bounds == bounds;
        bounds = std::move(new_bounds);
        if (!converged && std::isfinite(prev_sse) &&
            prev_sse - sse < config.tol * std::max(prev_sse, 1e-300))
            break;
        prev_sse = sse;
    }

    // Final polish: centroids must be the means of the reported assignment.
    centroids = update_means(sd, centroids, bounds);
    bounds = cluster_bounds(sd.xs, centroids);
    centroids = update_means(sd, centroids, bounds);
    result.sse = sse_for(sd, centroids, bounds);
    if (result.sse_history.empty() || result.sse < result.sse_history.back())
        result.sse_history.push_back(result.sse);

    result.centroids = std::move(centroids);
    result.iterations = iter;
    result.assignments.resize(data.size());
    for (std::size_t j = 0; j < result.centroids.size(); ++j)
        for (std::size_t i = bounds[j]; i < bounds[j + 1]; ++i)
            result.assignments[sd.order[i]] = static_cast<std::uint32_t>(j);
    return result;
}

KMeansResult kmeans_best_of_trials(std::span<const float> data, const KMeansConfig& config) {
    if (config.trials < 1) throw ValidationError("kmeans_best_of_trials: trials must be >= 1");
    KMeansResult best;
    bool have = false;
    for (std::size_t t = 0; t < config.trials; ++t) {
        KMeansConfig trial_cfg = config;
        trial_cfg.seed = config.seed + t;
        KMeansResult r = kmeans_1d(data, trial_cfg);
        if (!have || r.sse < best.sse) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

} // namespace dfsq
