// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfsq/rng.hpp"
#include "dfsq/tensor.hpp"

#include <cstdint>
#include <vector>

namespace dfsq {

/// One synthetic activation channel: a 1-3 component Gaussian mixture with
/// randomized means and scales plus sparse lognormal outliers, stretched by a
/// per-channel lognormal gain and offset. Mimics the strong cross-channel and
/// cross-sample variation of batch-norm-free activations.
std::vector<float> synthetic_channel(Rng& rng, std::size_t n);

/// Tensor filled channel by channel with synthetic_channel; the RNG for
/// (sample i, channel c) is seeded derive_seed(seed, i, c), so contents do
/// not depend on fill order.
Tensor synthetic_tensor(std::uint64_t b, std::uint64_t c, std::uint64_t h, std::uint64_t w,
                        std::uint64_t seed);

/// Heavy right tail centered at zero: exp(N(0, 1)) - 1 (the lognormal median).
std::vector<float> lognormal_centered(Rng& rng, std::size_t n);

} // namespace dfsq
