// SPDX-License-Identifier: Apache-2.0
#include "dfsq/synthetic.hpp"

#include <algorithm>

namespace dfsq {

std::vector<float> synthetic_channel(Rng& rng, std::size_t n) {
    const std::size_t components = 1 + rng.uniform_index(3);
    std::vector<double> means(components), sds(components);
    for (std::size_t k = 0; k < components; ++k) {
        means[k] = rng.uniform(-3.0, 3.0);
        sds[k] = rng.lognormal(-0.5, 0.6);
    }
    const double gain = rng.lognormal(0.0, 1.0);
    const double offset = rng.uniform(-5.0, 5.0);

    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rng.uniform_index(components);
        double v = rng.normal(means[k], sds[k]);
        if (rng.uniform() < 0.02) v += (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.lognormal(1.5, 0.8);
        out[i] = static_cast<float>(gain * v + offset);
    }
    return out;
}

Tensor synthetic_tensor(std::uint64_t b, std::uint64_t c, std::uint64_t h, std::uint64_t w,
                        std::uint64_t seed) {
    Tensor t = Tensor::zeros(b, c, h, w);
    for (std::uint64_t i = 0; i < b; ++i) {
        for (std::uint64_t ch = 0; ch < c; ++ch) {
            Rng rng(derive_seed(seed, i, ch));
            const auto values = synthetic_channel(rng, t.channel_size());
            auto dst = t.channel(i, ch);
            std::copy(values.begin(), values.end(), dst.begin());
        }
    }
    return t;
}

std::vector<float> lognormal_centered(Rng& rng, std::size_t n) {
    std::vector<float> out(n);
    for (auto& v : out) v = static_cast<float>(rng.lognormal(0.0, 1.0) - 1.0);
    return out;
}

} // namespace dfsq
